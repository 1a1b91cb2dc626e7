// expect: pos=5
int a[8] = {9, 4, 16, 25, 1, 36, 49, 0};
int key = 36;
int pos = -1;

int main() {
    for (int i = 0; i < 8; i++) {
        if (a[i] == key) {
            pos = i;
            break;
        }
    }
}
