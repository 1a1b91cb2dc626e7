// expect: count=-56 outer=10
// steps: 4000
int count;
int outer;

int main() {
    for (outer = 0; outer < 10; outer++) {
        for (int j = 0; j < 20; j++) count++;
    }
}
