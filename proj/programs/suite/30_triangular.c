// expect: t=78
int t;

int main() {
    for (int i = 1; i <= 12; i++) t += i;
}
