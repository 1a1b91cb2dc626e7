// expect: p=1 c=5
int x = -74;
int p;
int c;

int main() {
    for (int i = 0; i < 8; i++) {
        p ^= x & 1;
        c += x & 1;
        x >>= 1;
    }
}
