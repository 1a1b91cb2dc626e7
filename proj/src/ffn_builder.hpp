// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "loom/bipolar.hpp"
#include "loom/weights.hpp"

namespace loom::detail {

// Affine form over state rows: sum w_i x_row + c.
struct Lin {
    std::vector<std::pair<int, double>> w;
    double c = 0.0;

    Lin& add(int row, double v) {
        w.emplace_back(row, v);
        return *this;
    }
    Lin& k(double v) {
        c += v;
        return *this;
    }
    Lin operator+(const Lin& o) const {
        Lin r = *this;
        r.w.insert(r.w.end(), o.w.begin(), o.w.end());
        r.c += o.c;
        return r;
    }
    Lin scaled(double f) const {
        Lin r = *this;
        for (auto& [row, v] : r.w) v *= f;
        r.c *= f;
        return r;
    }
};

struct FfnRow {
    Lin in;
    std::vector<std::pair<int, double>> out;
    std::string group;
};

class FfnBuilder {
public:
    // Adds ReLU(in) routed to out rows with the given weights.
    void row(const std::string& group, const Lin& in, std::vector<std::pair<int, double>> out) {
        rows_.push_back({in, std::move(out), group});
    }
    // Adds b2 (column-constant output bias).
    void out_bias(int row, double v) { out_bias_.emplace_back(row, v); }

    int size() const { return static_cast<int>(rows_.size()); }

    // Writes W1/b1/W2/b2 into the layer, padding with zero rows up to width.
    void finish(Layer& layer, int d, int width = 0) const;

private:
    std::vector<FfnRow> rows_;
    std::vector<std::pair<int, double>> out_bias_;
};

// Shared gate terms. All rows that should act only on the register column
// add one of these, scaled by a large constant.
struct Gates {
    const MachineConfig& cfg;
    RowLayout L;
    GateConstants G;

    explicit Gates(const MachineConfig& c) : cfg(c), L(c), G(gate_constants(c)) {}

    // 0 at column 0, <= -1 elsewhere.
    Lin rho(double g) const {
        return Lin{}.add(L.pos + cfg.ell - 1 - cfg.log2_s(), g).add(L.ind, 2.0 * g).k(-2.0 * g);
    }
    // 0 when addr_a holds opcode k at column 0, <= -2g otherwise.
    Lin opcode(int k, double g) const {
        Lin out;
        const auto e = encode_word(k, cfg.ell);
        for (int i = 0; i < cfg.ell; ++i) out.add(L.addr_a + i, g * e[static_cast<std::size_t>(i)]);
        return out.k(-g * cfg.ell);
    }
    // Unit that reads 0.5 on opcode k at column 0 and 0 elsewhere.
    Lin opcode_unit(int k) const { return opcode(k, 1.0).k(0.5); }
    // Unit that reads 1 at column 0 and 0 elsewhere.
    Lin register_unit() const { return rho(G.word).k(1.0); }
    // 0 when the opcode field is below s (extended opcode), >= 2 otherwise.
    Lin subleq_measure() const {
        Lin out;
        const int top = cfg.ell - cfg.log2_s();
        for (int i = 0; i < top; ++i) out.add(L.addr_a + i, 1.0);
        return out.k(top);
    }
};

inline Lin var(int row, double v = 1.0) { return Lin{}.add(row, v); }

// Two rows that add -x to row `target` (x read from row `src`): clears a
// value when src == target.
inline void clear_rows(FfnBuilder& f, const std::string& group, int src, int target, const Lin& gate = {}) {
    f.row(group, var(src) + gate, {{target, -1.0}});
    f.row(group, var(src, -1.0) + gate, {{target, 1.0}});
}

// Six rows implementing snap(x) - x on `row`: values within 0.1 of {-1,0,1}
// land exactly on it.
void snap_rows(FfnBuilder& f, const std::string& group, int row);

}  // namespace loom::detail
