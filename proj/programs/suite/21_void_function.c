// expect: total=13
int total;

void add(int v) { total += v; }

int main() {
    add(5);
    add(-2);
    add(10);
}
