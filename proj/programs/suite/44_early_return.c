// expect: s1=-1 s2=0 s3=1
int x1 = -9;
int x2;
int x3 = 44;
int s1;
int s2;
int s3;

int sign(int x) {
    if (x < 0) return -1;
    if (x == 0) return 0;
    return 1;
}

int main() {
    s1 = sign(x1);
    s2 = sign(x2);
    s3 = sign(x3);
}
