// Snake on an 8x8 board, one move per run of main. The host writes the
// pressed key into key before each tick and reads the game back from
// memory. Keys: 0 up, 1 right, 2 down, 3 left, 4 pause toggle, 5 restart
// after a crash; anything else keeps the current heading. Cells are
// numbered y * 8 + x. rows[y] has bit x set for every cell the snake
// covers, so collision checks do not depend on the snake's length.
int key = -1;
int dir = 1;
int hx = 3;
int hy = 4;
int len = 3;
int head = 2;
int body[8] = {33, 34, 35};  // ring buffer of cells, newest at head
int rows[8] = {0, 0, 0, 0, 14};
int bit[8] = {1, 2, 4, 8, 16, 32, 64, -128};
int food = 38;
int seed = 11;
int score;
int best;
int alive = 1;
int paused;

// Next pseudo-random cell on the board.
int roll() {
    seed = (seed << 2) + seed + 3;
    return seed & 63;
}

int taken(int c) { return rows[c >> 3] & bit[c & 7]; }

void crash() {
    alive = 0;
    best = max(best, score);
}

void restart() {
    rows[0] = 0;
    rows[1] = 0;
    rows[2] = 0;
    rows[3] = 0;
    rows[4] = 14;
    rows[5] = 0;
    rows[6] = 0;
    rows[7] = 0;
    dir = 1;
    hx = 3;
    hy = 4;
    len = 3;
    head = 2;
    body[0] = 33;
    body[1] = 34;
    body[2] = 35;
    score = 0;
    alive = 1;
    paused = 0;
}

int main() {
    int k = key;
    key = -1;
    if (!alive) {
        if (k == 5) {
            restart();
            food = roll();
            while (taken(food)) food = roll();
        }
        return;
    }
    if (k == 4) paused = !paused;
    if (paused) return;
    if (k >= 0 && k <= 3 && (k ^ dir) != 2) dir = k;

    if (dir == 0) hy--;
    else if (dir == 1) hx++;
    else if (dir == 2) hy++;
    else hx--;
    if (hx < 0 || hx > 7 || hy < 0 || hy > 7) {
        crash();
        return;
    }
    int p = (hy << 3) + hx;
    int eat = p == food;
    int grow = eat && len < 8;
    if (!grow) {
        k = body[(head - len + 1) & 7];  // tail cell
        rows[k >> 3] ^= bit[k & 7];
    }
    if (rows[hy] & bit[hx]) {
        crash();
        return;
    }
    rows[hy] |= bit[hx];
    head = (head + 1) & 7;
    body[head] = p;
    if (eat) {
        score++;
        if (grow) len++;
        food = roll();
        for (int tries = 0; tries < 8 && taken(food); tries++) food = roll();
    }
}
