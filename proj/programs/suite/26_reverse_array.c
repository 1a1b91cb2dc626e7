// expect: a[0]=7 a[1]=6 a[2]=5 a[3]=4 a[4]=3 a[5]=2 a[6]=1
int a[7] = {1, 2, 3, 4, 5, 6, 7};

int main() {
    for (int i = 0; i < 3; i++) swap(a[i], a[6 - i]);
}
