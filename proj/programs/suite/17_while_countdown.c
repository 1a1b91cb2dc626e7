// expect: s=55 n=0
int n = 10;
int s;

int main() {
    while (n > 0) {
        s += n;
        n--;
    }
}
