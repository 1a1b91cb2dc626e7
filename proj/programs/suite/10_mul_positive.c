// expect: r=63
int x = 7;
int y = 9;
int r;

int main() { r = mul(x, y); }
