// expect: a[0]=11 a[1]=12 a[2]=26 a[3]=14
int a[4] = {1, 2, 3, 4};

int main() {
    for (int i = 0; i < 4; i++) a[i] += 10;
    a[2] <<= 1;
}
