// expect: p=37 q=12 r=0
int x = -37;
int y = 12;
int z;
int p;
int q;
int r;

int main() {
    p = abs(x);
    q = abs(y);
    r = abs(z);
}
