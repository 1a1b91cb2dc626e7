// expect: n=5
int a[10] = {3, 1, 3, 3, 0, 2, 3, 1, 3, 2};
int n;

int main() {
    for (int i = 0; i < 10; i++) {
        if (a[i] == 3) n++;
    }
}
