// expect: x=-126 y=126 z=-128
int x = 120;
int y = -120;
int z = 127;

int main() {
    x += 10;
    y -= 10;
    z++;
}
