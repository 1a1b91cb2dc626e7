// Sorts eight values in place, ascending. Comparisons look at the sign of
// the wrapped difference, so the values stay within +-63.
int a[8] = {42, -7, 19, 0, 61, -63, 5, 19};

int main() {
    for (int i = 0; i < 7; i++) {
        for (int j = 0; j < 7 - i; j++) {
            if (a[j] > a[j + 1]) {
                swap(a[j], a[j + 1]);
            }
        }
    }
}
