// expect: s=45 a[5]=15 a[0]=0
int a[6];
int s;

int main() {
    for (int i = 0; i < 6; i++) a[i] = (i << 1) + i;
    for (int i = 0; i < 6; i++) s += a[i];
}
