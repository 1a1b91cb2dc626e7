// expect: x=-8 y=3
int x = 3;
int y = -8;

int main() { swap(x, y); }
