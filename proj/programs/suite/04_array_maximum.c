// expect: m=27
int v[8] = {14, -3, 27, 8, -19, 6, 0, 11};
int m;

int main() {
    m = v[0];
    for (int i = 1; i < 8; i++) m = max(m, v[i]);
}
