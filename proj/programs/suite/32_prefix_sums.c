// expect: a[0]=4 a[1]=3 a[2]=6 a[3]=13 a[4]=11 a[5]=16
int a[6] = {4, -1, 3, 7, -2, 5};

int main() {
    for (int i = 1; i < 6; i++) a[i] += a[i - 1];
}
