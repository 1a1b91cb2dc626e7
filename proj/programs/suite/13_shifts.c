// expect: l=20 rr=-8 z=64
int x = 5;
int y = -64;
int z = 1;
int l;
int rr;

int main() {
    l = x << 2;
    rr = y >> 3;
    z <<= 6;
}
