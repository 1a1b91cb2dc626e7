// expect: r=-42 s=12
int x = -6;
int y = 7;
int z = -2;
int r;
int s;

int main() {
    r = mul(x, y);
    s = mul(x, z);
}
