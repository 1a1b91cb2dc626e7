// expect: b[0]=10 b[1]=-20 b[2]=30 b[3]=-40 b[4]=50
int a[5] = {10, -20, 30, -40, 50};
int b[5];

int main() {
    for (int i = 0; i < 5; i++) b[i] = a[i];
}
