// expect: r=12 s=-15
int a = -3;
int b = -4;
int r;
int s;

int main() {
    r = a * b;
    s = a * 5;
}
