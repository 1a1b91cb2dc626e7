// expect: s=100
int s;

int main() {
    for (int i = 1; i <= 4; i++) {
        for (int j = 1; j <= 4; j++) s += mul(i, j);
    }
}
