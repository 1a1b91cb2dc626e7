// expect: a[0]=5 a[1]=4 a[2]=3 a[3]=2 a[4]=1
int a[5] = {1, 2, 3, 4, 5};
int i;
int j = 4;

int main() {
    swap(a[i], a[j]);
    swap(a[1], a[j - 1]);
}
