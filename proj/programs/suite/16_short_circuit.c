// expect: calls=1 r=0 r2=1
int z;
int calls;
int r;
int r2;

int bump() {
    calls++;
    return 1;
}

int main() {
    if (z && bump()) r = 1;
    if (z || bump()) r2 = 1;
}
