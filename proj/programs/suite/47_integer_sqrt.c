// expect: r=10 n=0
int n = 100;
int r;

int main() {
    int odd = 1;
    while (n >= odd) {
        n -= odd;
        odd += 2;
        r++;
    }
}
