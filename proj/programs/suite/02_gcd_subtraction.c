// expect: a=12 b=12
int a = 84;
int b = 36;

int main() {
    while (a != b) {
        if (a > b) a -= b;
        else b -= a;
    }
}
