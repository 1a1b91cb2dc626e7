// expect: a[0]=-7 a[1]=-2 a[2]=0 a[3]=3 a[4]=5 a[5]=9
int a[6] = {5, -2, 9, 0, -7, 3};

int main() {
    for (int i = 0; i < 5; i++) {
        for (int j = 0; j < 5 - i; j++) {
            if (a[j] > a[j + 1]) swap(a[j], a[j + 1]);
        }
    }
}
