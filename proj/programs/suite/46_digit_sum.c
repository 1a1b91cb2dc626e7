// expect: s=16
int n = 97;
int s;

int main() {
    while (n >= 10) {
        n -= 10;
        s++;
    }
    s += n;
}
