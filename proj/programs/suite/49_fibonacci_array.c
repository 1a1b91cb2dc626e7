// expect: f[10]=55 f[11]=89
int f[12];

int main() {
    f[1] = 1;
    for (int i = 2; i < 12; i++) f[i] = f[i - 1] + f[i - 2];
}
