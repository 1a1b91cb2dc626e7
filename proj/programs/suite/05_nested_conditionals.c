// expect: c0=1 c1=2 c2=3 c3=4
int c0;
int c1;
int c2;
int c3;

int classify(int x) {
    if (x < 0) {
        return 1;
    } else {
        if (x == 0) {
            return 2;
        } else {
            if (x < 10) return 3;
            else return 4;
        }
    }
}

int main() {
    c0 = classify(-5);
    c1 = classify(0);
    c2 = classify(7);
    c3 = classify(50);
}
