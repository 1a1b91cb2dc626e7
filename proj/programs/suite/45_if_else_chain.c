// expect: g1=4 g2=3 g3=2 g4=0
int g1;
int g2;
int g3;
int g4;

int grade(int s) {
    if (s >= 90) return 4;
    else if (s >= 80) return 3;
    else if (s >= 70) return 2;
    else if (s >= 60) return 1;
    return 0;
}

int main() {
    g1 = grade(95);
    g2 = grade(83);
    g3 = grade(71);
    g4 = grade(10);
}
