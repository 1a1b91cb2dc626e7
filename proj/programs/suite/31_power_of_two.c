// expect: p=64 i=6
int p = 1;
int i;

int main() {
    for (i = 0; i < 6; i++) p <<= 1;
}
