// expect: lt=1 le=1 gt=0 ge=0 eq=0 ne=1
int x = 4;
int y = 9;
int lt;
int le;
int gt;
int ge;
int eq;
int ne;

int main() {
    lt = x < y;
    le = x <= y;
    gt = x > y;
    ge = x >= y;
    eq = x == y;
    ne = x != y;
}
