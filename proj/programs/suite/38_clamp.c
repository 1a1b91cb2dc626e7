// expect: r1=50 r2=-10 r3=7
int v1 = 90;
int v2 = -40;
int v3 = 7;
int r1;
int r2;
int r3;

int clamp(int v) { return max(-10, min(v, 50)); }

int main() {
    r1 = clamp(v1);
    r2 = clamp(v2);
    r3 = clamp(v3);
}
