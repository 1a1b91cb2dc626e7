// expect: s=50
int a[10] = {12, -5, 7, 30, -14, 2, 9, -1, 4, 6};
int s;

int main() {
    for (int i = 0; i < 10; i++) s += a[i];
}
