// expect: r=34
int a = 5;
int b = 3;
int r;

int sq(int x) { return mul(x, x); }

int main() { r = sq(a) + sq(b); }
