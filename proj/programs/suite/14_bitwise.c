// expect: a=10 o=95 e=85 n=-91
int x = 90;
int y = 15;
int a;
int o;
int e;
int n;

int main() {
    a = x & y;
    o = x | y;
    e = x ^ y;
    n = ~x;
}
