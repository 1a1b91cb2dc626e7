// expect: r=13 s=19 u=-56 v=7
int r;
int s;
int u;
int v;

int main() {
    r = (3 + 4) * 2 - 1;
    s = (1 << 4) | 3;
    u = 100 + 100;
    v = -(5 - 12);
}
