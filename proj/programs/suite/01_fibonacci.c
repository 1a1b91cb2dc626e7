// expect: r=55
int r;

int main() {
    int a = 0;
    int b = 1;
    for (int i = 0; i < 10; i++) {
        int t = a + b;
        a = b;
        b = t;
    }
    r = a;
}
