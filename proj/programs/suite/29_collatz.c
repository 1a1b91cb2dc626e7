// expect: n=1 steps=8
int n = 6;
int steps;

int main() {
    while (n != 1) {
        if (n & 1) n = (n << 1) + n + 1;
        else n >>= 1;
        steps++;
    }
}
