// expect: y=-17 z=14 w=-128
int x = 17;
int m = -128;
int y;
int z;
int w;

int main() {
    y = -x;
    z = -(y + 3);
    w = -m;
}
