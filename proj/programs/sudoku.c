// Iterative backtracking Sudoku solver. Givens are stored negated so the
// solver can tell them apart from its own guesses; 0 marks an empty cell.
// The givens are checked for conflicts before solving.
int g[81] = {
    -5, -3,  0,  0, -7,  0,  0,  0,  0,
    -6,  0,  0, -1, -9, -5,  0,  0,  0,
     0, -9, -8,  0,  0,  0,  0, -6,  0,
    -8,  0,  0,  0, -6,  0,  0,  0, -3,
    -4,  0,  0, -8,  0, -3,  0,  0, -1,
    -7,  0,  0,  0, -2,  0,  0,  0, -6,
     0, -6,  0,  0,  0,  0, -2, -8,  0,
     0,  0,  0, -4, -1, -9,  0,  0, -5,
     0,  0,  0,  0, -8,  0,  0, -7, -9
};
int solved;  // 1 solved, -1 conflicting givens or no solution
int cr;
int cc;

void locate(int k) {
    cr = 0;
    cc = k;
    while (cc >= 9) {
        cc -= 9;
        cr++;
    }
}

// Each *_has returns 1 when v appears in the unit outside cell skip.
int row_has(int r, int v, int skip) {
    int p = (r << 3) + r;
    for (int i = 0; i < 9; i++) {
        if (p != skip && abs(g[p]) == v) return 1;
        p++;
    }
    return 0;
}

int col_has(int c, int v, int skip) {
    int p = c;
    for (int i = 0; i < 9; i++) {
        if (p != skip && abs(g[p]) == v) return 1;
        p += 9;
    }
    return 0;
}

int box_has(int r, int c, int v, int skip) {
    int p = 0;
    if (r >= 3) p = 27;
    if (r >= 6) p = 54;
    if (c >= 3) p += 3;
    if (c >= 6) p += 3;
    for (int i = 0; i < 3; i++) {
        for (int j = 0; j < 3; j++) {
            if (p != skip && abs(g[p]) == v) return 1;
            p++;
        }
        p += 6;
    }
    return 0;
}

int main() {
    for (int k = 0; k < 81; k++) {
        if (g[k] < 0) {
            locate(k);
            int v = -g[k];
            if (row_has(cr, v, k) || col_has(cc, v, k) || box_has(cr, cc, v, k)) {
                solved = -1;
                return;
            }
        }
    }

    int k = 0;
    int back = 0;
    while (k < 81) {
        if (k < 0) {
            solved = -1;
            return;
        }
        if (g[k] < 0) {
            if (back) k--;
            else k++;
            continue;
        }
        locate(k);
        int v = g[k] + 1;
        while (v <= 9 && (row_has(cr, v, k) || col_has(cc, v, k) || box_has(cr, cc, v, k))) v++;
        if (v <= 9) {
            g[k] = v;
            back = 0;
            k++;
        } else {
            g[k] = 0;
            back = 1;
            k--;
        }
    }

    solved = 1;
}
