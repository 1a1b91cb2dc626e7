// expect: idx=3
int a[8] = {3, 17, 42, 51, 9, 77, 60, 2};
int idx = -1;

int main() {
    for (int i = 0; i < 8; i++) {
        if (a[i] > 50) {
            idx = i;
            break;
        }
    }
}
