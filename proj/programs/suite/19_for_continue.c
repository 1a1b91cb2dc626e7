// expect: s=64
int s;

int main() {
    for (int i = 0; i < 16; i++) {
        if ((i & 1) == 0) continue;
        s += i;
    }
}
