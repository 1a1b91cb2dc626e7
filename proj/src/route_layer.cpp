// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "ffn_builder.hpp"
#include "loom/isa.hpp"

namespace loom {

using detail::clear_rows;
using detail::FfnBuilder;
using detail::Gates;
using detail::Lin;
using detail::var;

int route_layer_budget(const MachineConfig& cfg) { return 80 * cfg.nbits; }

namespace {

using Out = std::vector<std::pair<int, double>>;

struct Router {
    const MachineConfig& cfg;
    Gates g;
    const RowLayout& L;
    FfnBuilder f;
    double G;
    int N;

    explicit Router(const MachineConfig& c) : cfg(c), g(c), L(g.L), G(g.G.word), N(c.nbits) {}

    // Bipolar operand bits reconstructed from the half-scale buffers.
    Lin A(int i, double w = 1.0) const { return var(L.buf_a + i, 2.0 * w); }
    Lin B(int i, double w = 1.0) const { return var(L.buf_b + i, 2.0 * w); }
    Lin C(int i, double w = 1.0) const { return var(L.buf_c + i, 2.0 * w); }
    Lin op(Opcode k) const { return g.opcode(static_cast<int>(k), G); }
    static std::string name(Opcode k) { return opcode_name(k); }

    // Unit worth 0.5 on opcode k; `out` holds the full-scale effect.
    void unit(Opcode k, Out out) {
        for (auto& [row, v] : out) v *= 2.0;
        f.row(name(k), g.opcode_unit(static_cast<int>(k)), std::move(out));
    }
    Out fill(int row, int width, double v) const {
        Out o;
        for (int i = 0; i < width; ++i) o.emplace_back(row + i, v);
        return o;
    }
    Out zero_sub() const { return fill(L.scr_sub, N, -1.0); }

    // Two rows adding (x) to `target`: ReLU(x)*1 - ReLU(-x)*1.
    void add_value(const std::string& grp, const Lin& x, int target, const Lin& gate) {
        f.row(grp, x + gate, {{target, 1.0}});
        f.row(grp, x.scaled(-1.0) + gate, {{target, -1.0}});
    }

    // Count of set bits of C strictly below bit i (MSB-first index).
    Lin set_bits_below(int i) const {
        Lin s;
        for (int j = i + 1; j < N; ++j) s.add(L.buf_c + j, 1.0);
        return s.k(0.5 * (N - 1 - i));
    }

    // Adds 2*bit(ptr + s) into ell rows at `out`, where ptr is the unsigned
    // value of C. Returns constant bits that the caller folds into a unit.
    std::vector<double> pointer_network(const std::string& grp, Opcode k, int out) {
        const int l = cfg.ell, ls = cfg.log2_s();
        std::vector<double> constant(static_cast<std::size_t>(l), 0.0);
        const Lin gate = op(k);
        for (int bit = 0; bit < l; ++bit) {
            const int row = out + (l - 1 - bit);
            if (bit < ls) {
                if (bit < N) f.row(grp, C(N - 1 - bit) + gate, {{row, 2.0}});
                continue;
            }
            const int top = std::min(bit, N - 1);
            Lin T;
            for (int j = 0; j <= top; ++j) T.add(L.buf_c + (N - 1 - j), std::ldexp(1.0, j)).k(std::ldexp(0.5, j));
            const double smod = static_cast<double>(cfg.s % (1 << (bit + 1)));
            T.k(smod);
            const double tmin = smod, tmax = smod + std::ldexp(1.0, top + 1) - 1.0;
            const std::pair<double, double> thresholds[] = {
                {std::ldexp(1.0, bit), 1.0}, {std::ldexp(1.0, bit + 1), -1.0}, {3.0 * std::ldexp(1.0, bit), 1.0}};
            for (const auto& [theta, sign] : thresholds) {
                if (theta <= tmin) {
                    constant[static_cast<std::size_t>(l - 1 - bit)] += sign;
                } else if (theta <= tmax) {
                    f.row(grp, Lin(T).k(-theta + 1.0) + gate, {{row, 2.0 * sign}});
                    f.row(grp, Lin(T).k(-theta) + gate, {{row, -2.0 * sign}});
                }
            }
        }
        return constant;
    }

    void build() {
        const Lin R = g.rho(G);
        for (int i = 0; i < N; ++i) {
            add_value("subleq_copy", A(i), L.scr_sub + i, R);
            clear_rows(f, "subleq_copy", L.buf_a + i, L.buf_a + i);
        }
        for (int i = 0; i < N; ++i) {
            add_value("bufb_to_scrmin", B(i), L.scr_min + i, R);
            clear_rows(f, "bufb_to_scrmin", L.buf_b + i, L.buf_b + i);
        }
        for (int i = 0; i < N; ++i) clear_rows(f, "bufc_clear", L.buf_c + i, L.buf_c + i);
        {
            Out o = fill(L.load_temp, cfg.ell, -1.0);
            for (auto& e : fill(L.find_temp, N, -2.0)) o.push_back(e);
            f.row("temp_defaults", g.register_unit(), o);
        }

        for (Opcode k : {Opcode::HALT, Opcode::JMP, Opcode::JZ, Opcode::JNZ, Opcode::CMP}) unit(k, zero_sub());
        unit(Opcode::INC, fill(L.scr_sub, N, 1.0));
        {
            Out o;
            const auto one = encode_word(1, N);
            for (int i = 0; i < N; ++i) o.emplace_back(L.scr_sub + i, one[static_cast<std::size_t>(i)]);
            unit(Opcode::DEC, o);
        }

        unit(Opcode::MOV, zero_sub());
        for (int i = 0; i < N; ++i) add_value("MOV", C(i) + B(i, -1.0), L.scr_min + i, op(Opcode::MOV));

        for (int i = 0; i < N; ++i) {
            const Lin gate = op(Opcode::ADD);
            add_value("ADD", C(i, -1.0), L.scr_sub + i, gate);
            const Lin s2 = set_bits_below(i).scaled(-2.0);
            f.row("ADD", C(i) + s2 + gate, {{L.scr_sub + i, 2.0}});
            f.row("ADD", C(i, -1.0) + s2 + gate, {{L.scr_sub + i, -2.0}});
        }

        for (int i = 0; i < N; ++i) add_value("SUB", C(i), L.scr_sub + i, op(Opcode::SUB));

        auto shl = [&](Opcode k) {
            for (int i = 0; i + 1 < N; ++i) add_value(name(k), B(i + 1) + B(i, -1.0), L.scr_min + i, op(k));
            f.row(name(k), B(N - 1) + op(k), {{L.scr_min + N - 1, -2.0}});
        };
        unit(Opcode::SHL, zero_sub());
        shl(Opcode::SHL);

        unit(Opcode::SHR, zero_sub());
        for (int i = 1; i < N; ++i) add_value("SHR", B(i - 1) + B(i, -1.0), L.scr_min + i, op(Opcode::SHR));

        unit(Opcode::AND, zero_sub());
        for (int i = 0; i < N; ++i) f.row("AND", B(i) + C(i, -1.0).k(-1.0) + op(Opcode::AND), {{L.scr_min + i, -2.0}});
        unit(Opcode::OR, zero_sub());
        for (int i = 0; i < N; ++i) f.row("OR", C(i) + B(i, -1.0).k(-1.0) + op(Opcode::OR), {{L.scr_min + i, 2.0}});
        unit(Opcode::XOR, zero_sub());
        for (int i = 0; i < N; ++i) {
            f.row("XOR", C(i) + B(i, -1.0).k(-1.0) + op(Opcode::XOR), {{L.scr_min + i, 2.0}});
            f.row("XOR", C(i) + B(i).k(-1.0) + op(Opcode::XOR), {{L.scr_min + i, -2.0}});
        }

        unit(Opcode::SWAP, zero_sub());
        for (int i = 0; i < N; ++i) add_value("SWAP", C(i) + B(i, -1.0), L.scr_min + i, op(Opcode::SWAP));
        for (int i = 0; i < N; ++i) add_value("SWAP", B(i), L.buf_c + i, op(Opcode::SWAP));

        // B_0 = +1 (negative) opens the conditional rows.
        const Lin sign_open = B(0, G).k(-G);
        unit(Opcode::CMOV, zero_sub());
        f.row("CMOV", C(0, -1.0) + B(0).k(-1.0) + op(Opcode::CMOV), {{L.scr_min, -2.0}});
        for (int i = 1; i < N; ++i) {
            add_value("CMOV", C(i) + B(i, -1.0), L.scr_min + i, op(Opcode::CMOV) + sign_open);
        }

        unit(Opcode::MULACC, zero_sub());
        shl(Opcode::MULACC);
        for (int i = 0; i < N; ++i) {
            const Lin gate = op(Opcode::MULACC) + sign_open;
            const Lin s2 = set_bits_below(i).scaled(-2.0);
            f.row("MULACC", C(i) + s2 + gate, {{L.scr_sub + i, 2.0}});
            f.row("MULACC", C(i, -1.0) + gate, {{L.scr_sub + i, 2.0}});
            f.row("MULACC", C(i, -1.0) + s2 + gate, {{L.scr_sub + i, -2.0}});
        }

        {
            const auto k = Opcode::LOAD;
            for (int i = 0; i < N; ++i) add_value("LOAD", B(i, -1.0), L.scr_min + i, op(k));
            const auto consts = pointer_network("LOAD", k, L.load_temp);
            Out o = zero_sub();
            for (int i = 0; i < cfg.ell; ++i) {
                if (consts[static_cast<std::size_t>(i)] != 0.0) o.emplace_back(L.load_temp + i, 2.0 * consts[static_cast<std::size_t>(i)]);
            }
            unit(k, o);
        }
        {
            const auto k = Opcode::FIND;
            Out o = zero_sub();
            for (auto& e : fill(L.find_temp, N, 2.0)) o.push_back(e);
            unit(k, o);
            for (int i = 0; i < N; ++i) add_value("FIND", B(i, -1.0), L.scr_min + i, op(k));
            for (int i = 0; i < N; ++i) add_value("FIND", C(i), L.find_temp + i, op(k));
        }
        {
            const auto k = Opcode::STORE;
            for (int i = 0; i < cfg.ell; ++i) {
                f.row("STORE", var(L.addr_b + i) + op(k), {{L.addr_b + i, -1.0}});
                f.row("STORE", var(L.addr_b + i, -1.0) + op(k), {{L.addr_b + i, 1.0}});
            }
            const auto consts = pointer_network("STORE", k, L.addr_b);
            Out o = zero_sub();
            for (int i = 0; i < cfg.ell; ++i) o.emplace_back(L.addr_b + i, -1.0 + 2.0 * consts[static_cast<std::size_t>(i)]);
            unit(k, o);
        }
    }
};

}  // namespace

Layer build_route_layer(const MachineConfig& cfg) {
    const RowLayout L(cfg);
    const int N = cfg.nbits, d = cfg.d();
    Layer layer;
    layer.name = "L2 route";
    const int regs[3] = {L.addr_a, L.addr_b, L.addr_c};
    const int bufs[3] = {L.buf_a, L.buf_b, L.buf_c};
    for (int h = 0; h < 3; ++h) {
        Head head;
        head.Q = Eigen::MatrixXd::Zero(cfg.ell, d);
        for (int i = 0; i < cfg.ell; ++i) {
            head.Q(i, regs[h] + i) = 1.0;
            head.Q(i, L.pos + i) = 1.0;
        }
        head.V = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < N; ++i) head.V(bufs[h] + i, L.mem + i) = 1.0;
        layer.heads.push_back(std::move(head));
    }
    Router r(cfg);
    r.build();
    if (r.f.size() > route_layer_budget(cfg)) {
        throw ConfigError("route layer needs " + std::to_string(r.f.size()) + " rows, budget is " +
                          std::to_string(route_layer_budget(cfg)));
    }
    r.f.finish(layer, d, route_layer_budget(cfg));
    return layer;
}

}  // namespace loom
