// expect: lo=-5 hi=3 lo2=-5 hi2=3
int x = -5;
int y = 3;
int lo;
int hi;
int lo2;
int hi2;

int main() {
    lo = min(x, y);
    hi = max(x, y);
    lo2 = min(y, x);
    hi2 = max(y, x);
}
