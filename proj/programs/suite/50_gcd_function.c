// expect: g1=6 g2=7
int g1;
int g2;

int gcd(int a, int b) {
    while (a != b) {
        if (a > b) a -= b;
        else b -= a;
    }
    return a;
}

int main() {
    g1 = gcd(48, 18);
    g2 = gcd(35, 21);
}
