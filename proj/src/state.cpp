// SPDX-License-Identifier: Apache-2.0
#include "loom/state.hpp"

#include <cmath>
#include <sstream>

#include "loom/bipolar.hpp"

namespace loom {

namespace {

void put(State& st, int row, int col, std::int64_t value, int width) {
    double buf[64];
    encode_into(value, width, buf);
    for (int i = 0; i < width; ++i) st.X(row + i, col) = buf[i];
}

std::int64_t get(const State& st, int row, int col, int width, bool is_signed) {
    double buf[64];
    for (int i = 0; i < width; ++i) buf[i] = st.X(row + i, col);
    return decode_word(std::span<const double>(buf, static_cast<std::size_t>(width)), is_signed);
}

}  // namespace

State init_state(const MachineConfig& cfg, const Program& program) {
    cfg.validate();
    program.require_matches(cfg);
    State st(cfg);
    const auto& L = st.L;
    const int l = cfg.ell, N = cfg.nbits;

    for (int j = 1; j < cfg.n; ++j) put(st, L.pos, j, j, l);
    for (int j = 0; j < cfg.s; ++j) st.X(L.ind, j) = 1.0;
    put(st, L.pc, 0, cfg.instr_begin(), l);
    put(st, L.addr_a, 0, 0, l);
    put(st, L.addr_b, 0, 0, l);
    put(st, L.addr_c, 0, 0, l);

    for (int x = 0; x < cfg.m; ++x) {
        const int col = cfg.s + x;
        put(st, L.mem, col, program.memory[static_cast<std::size_t>(x)], N);
        put(st, L.tags, col, x, N);
    }
    for (int k = 0; k < cfg.instr_slots(); ++k) {
        const int col = cfg.instr_begin() + k;
        const Instruction ins = k < static_cast<int>(program.code.size()) ? program.code[static_cast<std::size_t>(k)]
                                                                        : Instruction{};
        put(st, L.cmd_a, col, ins.a, l);
        put(st, L.cmd_b, col, ins.b, l);
        put(st, L.cmd_c, col, ins.c, l);
    }
    return st;
}

std::int64_t read_memory_slot(const State& st, int x) {
    if (x < 0 || x >= st.cfg.m) throw RangeError("memory slot out of range");
    return get(st, st.L.mem, st.cfg.s + x, st.cfg.nbits, true);
}

std::vector<std::int64_t> read_memory(const State& st) {
    std::vector<std::int64_t> out(static_cast<std::size_t>(st.cfg.m));
    for (int x = 0; x < st.cfg.m; ++x) out[static_cast<std::size_t>(x)] = read_memory_slot(st, x);
    return out;
}

void write_memory(State& st, int x, std::int64_t value) {
    if (x < 0 || x >= st.cfg.m) throw RangeError("memory slot out of range");
    put(st, st.L.mem, st.cfg.s + x, value, st.cfg.nbits);
}

int read_pc(const State& st) { return static_cast<int>(get(st, st.L.pc, 0, st.cfg.ell, false)); }

void write_pc(State& st, int pc) {
    if (pc < 0 || pc >= st.cfg.n) throw RangeError("pc out of range");
    put(st, st.L.pc, 0, pc, st.cfg.ell);
}

AuditReport audit_state(const State& st, double tol) {
    AuditReport rep;
    const auto& cfg = st.cfg;
    const auto& L = st.L;
    const int l = cfg.ell, N = cfg.nbits;
    auto fail = [&](const std::string& what, int row, int col) {
        if (rep.violations.size() < 32) {
            std::ostringstream os;
            os << what << " at row " << row << " col " << col << " (" << st.X(row, col) << ")";
            rep.violations.push_back(os.str());
        }
    };
    auto expect = [&](const char* what, int row, int col, double v) {
        if (std::fabs(st.X(row, col) - v) > tol) fail(what, row, col);
    };
    auto expect_bipolar = [&](const char* what, int row, int col) {
        if (std::fabs(std::fabs(st.X(row, col)) - 1.0) > tol) fail(what, row, col);
    };
    auto expect_word = [&](const char* what, int row, int col, std::int64_t v, int width) {
        const auto e = encode_word(v, width);
        for (int i = 0; i < width; ++i) expect(what, row + i, col, e[static_cast<std::size_t>(i)]);
    };

    for (int j = 0; j < cfg.n; ++j) {
        const bool is_mem = j >= cfg.s && j < cfg.instr_begin();
        const bool is_ins = j >= cfg.instr_begin();
        expect("indicator", L.ind, j, (is_mem || is_ins) ? 0.0 : 1.0);
        if (j == 0) {
            for (int i = 0; i < l; ++i) expect("pos_enc", L.pos + i, 0, 0.0);
        } else {
            expect_word("pos_enc", L.pos, j, j, l);
        }
        for (int i = 0; i < N; ++i) {
            if (is_mem) {
                expect_bipolar("memory", L.mem + i, j);
            } else {
                expect("memory", L.mem + i, j, 0.0);
            }
        }
        if (is_mem) {
            expect_word("addr_tags", L.tags, j, j - cfg.s, N);
        } else {
            for (int i = 0; i < N; ++i) expect("addr_tags", L.tags + i, j, 0.0);
        }
        for (int i = 0; i < 3 * l; ++i) {
            if (is_ins) {
                expect_bipolar("commands", L.cmd_a + i, j);
            } else {
                expect("commands", L.cmd_a + i, j, 0.0);
            }
        }
        for (int r = L.scr_sub; r < L.pos; ++r) {
            const bool persistent = r >= L.addr_a && r < L.pos;
            if (j == 0 && persistent) {
                expect_bipolar("register", r, j);
            } else {
                expect("register", r, j, 0.0);
            }
        }
        for (int r = L.buf_a; r < L.tags; ++r) expect("register", r, j, 0.0);
    }
    return rep;
}

double persistent_drift(const State& st) {
    const auto& cfg = st.cfg;
    const auto& L = st.L;
    double worst = 0.0;
    for (int x = 0; x < cfg.m; ++x) {
        for (int i = 0; i < cfg.nbits; ++i) {
            worst = std::max(worst, std::fabs(std::fabs(st.X(L.mem + i, cfg.s + x)) - 1.0));
        }
    }
    for (int i = 0; i < cfg.ell; ++i) worst = std::max(worst, std::fabs(std::fabs(st.X(L.pc + i, 0)) - 1.0));
    return worst;
}

}  // namespace loom
