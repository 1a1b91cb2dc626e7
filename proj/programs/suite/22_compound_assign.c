// expect: x=12
int x = 9;

int main() {
    x += 5;
    x -= 2;
    x &= 6;
    x |= 1;
    x ^= 3;
    x <<= 2;
    x >>= 1;
}
