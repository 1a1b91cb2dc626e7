// expect: a=1 b=-128 c=127
int a;
int b = 127;
int c = -128;

int main() {
    a++;
    a++;
    a--;
    b++;
    c--;
}
