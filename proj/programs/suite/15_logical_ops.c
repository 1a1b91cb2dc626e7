// expect: t1=0 t2=1 t3=1 t4=1 t5=0
int x = 3;
int y;
int t1;
int t2;
int t3;
int t4;
int t5;

int main() {
    t1 = x && y;
    t2 = x || y;
    t3 = !y;
    t4 = x > 2 && y == 0;
    t5 = x < 2 || y != 0;
}
