// expect: f1=1 f2=0 f3=1 f4=0 f5=1 f6=0
int a = -5;
int b = 3;
int c = -100;
int d = -99;
int e = -1;
int f1;
int f2;
int f3;
int f4;
int f5;
int f6;

int main() {
    f1 = a < b;
    f2 = a > b;
    f3 = c < d;
    f4 = c >= d;
    f5 = e < 0;
    f6 = e >= 0;
}
