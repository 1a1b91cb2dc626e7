// SPDX-License-Identifier: Apache-2.0
#include "loom/weights.hpp"

#include <cmath>

#include "ffn_builder.hpp"

namespace loom {

using detail::clear_rows;
using detail::FfnBuilder;
using detail::Gates;
using detail::Lin;
using detail::var;

namespace detail {

void FfnBuilder::finish(Layer& layer, int d, int width) const {
    const int r = std::max(width, size());
    layer.W1 = Eigen::MatrixXd::Zero(r, d);
    layer.b1 = Eigen::VectorXd::Zero(r);
    layer.W2 = Eigen::MatrixXd::Zero(d, r);
    layer.b2 = Eigen::VectorXd::Zero(d);
    layer.row_group.assign(static_cast<std::size_t>(r), "");
    for (int i = 0; i < size(); ++i) {
        const auto& row = rows_[static_cast<std::size_t>(i)];
        for (const auto& [col, v] : row.in.w) layer.W1(i, col) += v;
        layer.b1(i) = row.in.c;
        for (const auto& [dst, v] : row.out) layer.W2(dst, i) += v;
        layer.row_group[static_cast<std::size_t>(i)] = row.group;
    }
    for (const auto& [dst, v] : out_bias_) layer.b2(dst) += v;
}

void snap_rows(FfnBuilder& f, const std::string& group, int row) {
    f.row(group, var(row).k(-0.4), {{row, 2.0}});
    f.row(group, var(row).k(-0.9), {{row, -2.0}});
    f.row(group, var(row, -1.0).k(-0.4), {{row, -2.0}});
    f.row(group, var(row, -1.0).k(-0.9), {{row, 2.0}});
    f.row(group, var(row), {{row, -1.0}});
    f.row(group, var(row, -1.0), {{row, 1.0}});
}

}  // namespace detail

namespace {

struct HeadSpec {
    std::vector<std::vector<std::pair<int, double>>> q;  // one entry per query row
    std::vector<std::tuple<int, int, double>> v;         // (dst, src, weight)
};

Head make_head(int d, const HeadSpec& spec) {
    Head h;
    h.Q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.q.size()), d);
    for (std::size_t i = 0; i < spec.q.size(); ++i) {
        for (const auto& [col, v] : spec.q[i]) h.Q(static_cast<Eigen::Index>(i), col) += v;
    }
    h.V = Eigen::MatrixXd::Zero(d, d);
    for (const auto& [dst, src, w] : spec.v) h.V(dst, src) += w;
    return h;
}

// Query rows reading `reg` plus the position code, one per bit.
HeadSpec address_head(int reg, int pos, int width) {
    HeadSpec s;
    for (int i = 0; i < width; ++i) s.q.push_back({{reg + i, 1.0}, {pos + i, 1.0}});
    return s;
}

// Bitwise subtraction a - b (MSB first) with each bit written as a bipolar
// value into out rows. Operands are affine forms per bit. Every row is gated
// by `gate`; the -3 offset must be supplied by the caller's register unit.
void subtract_rows(FfnBuilder& f, const std::string& group, const std::vector<Lin>& a, const std::vector<Lin>& b,
                   int out, const Lin& gate) {
    const int w = static_cast<int>(a.size());
    for (int i = 0; i < w; ++i) {
        Lin D;
        for (int j = i; j < w; ++j) {
            const double scale = std::ldexp(1.0, w - 2 - j);
            D = D + a[static_cast<std::size_t>(j)].scaled(scale) + b[static_cast<std::size_t>(j)].scaled(-scale);
        }
        const double P = std::ldexp(1.0, w - 1 - i);
        const Lin negD = D.scaled(-1.0);
        const int o = out + i;
        f.row(group, Lin(D).k(P + 1) + gate, {{o, 2.0}});
        f.row(group, Lin(D).k(P) + gate, {{o, -2.0}});
        f.row(group, Lin(negD) + gate, {{o, 2.0}});
        f.row(group, Lin(negD).k(-1) + gate, {{o, -2.0}});
        f.row(group, Lin(D).k(-P + 1) + gate, {{o, 2.0}});
        f.row(group, Lin(D).k(-P) + gate, {{o, -2.0}});
    }
}

}  // namespace

std::map<std::string, int> Layer::group_rows() const {
    std::map<std::string, int> out;
    for (const auto& g : row_group) {
        if (!g.empty()) ++out[g];
    }
    return out;
}

std::uint64_t Model::parameter_count() const {
    const std::uint64_t d = static_cast<std::uint64_t>(cfg.d());
    const std::uint64_t n = static_cast<std::uint64_t>(cfg.n);
    std::uint64_t total = 0;
    for (const auto& layer : layers) {
        for (const auto& h : layer.heads) total += 2 * static_cast<std::uint64_t>(h.Q.rows()) * d + d * d;
        const std::uint64_t r = static_cast<std::uint64_t>(layer.ffn_width());
        total += r * d + r * n + d * r + d * n;
    }
    return total;
}

std::uint64_t Model::nonzero_count() const {
    auto nnz = [](const auto& m) {
        std::uint64_t c = 0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) c += m(i, j) != 0.0;
        }
        return c;
    };
    std::uint64_t total = 0;
    for (const auto& layer : layers) {
        for (const auto& h : layer.heads) total += 2 * nnz(h.Q) + nnz(h.V);
        total += nnz(layer.W1) + nnz(layer.W2) + nnz(layer.b1) + nnz(layer.b2);
    }
    return total;
}

GateConstants gate_constants(const MachineConfig& cfg) {
    return {std::ldexp(1.0, cfg.nbits + 2), std::ldexp(1.0, cfg.ell + 2)};
}

Layer build_fetch_layer(const MachineConfig& cfg) {
    const Gates g(cfg);
    const auto& L = g.L;
    const int d = cfg.d(), width = 3 * cfg.ell;
    Layer layer;
    layer.name = "L1 fetch";
    HeadSpec h = address_head(L.pc, L.pos, cfg.ell);
    for (int i = 0; i < width; ++i) h.v.emplace_back(L.buf_a + i, L.cmd_a + i, 1.0);
    layer.heads.push_back(make_head(d, h));

    FfnBuilder f;
    const Lin gate = g.rho(g.G.word);
    for (int i = 0; i < width; ++i) {
        const int x = L.buf_a + i, a = L.addr_a + i;
        f.row("decode", var(x, 4.0) + gate, {{a, 0.5}});
        f.row("decode", var(x, -4.0) + gate, {{a, -0.5}});
        clear_rows(f, "clear_addr", a, a);
        clear_rows(f, "clear_buffer", x, x);
    }
    f.finish(layer, d);
    return layer;
}

Layer build_indirect_layer(const MachineConfig& cfg) {
    const Gates g(cfg);
    const auto& L = g.L;
    const int d = cfg.d(), N = cfg.nbits;
    Layer layer;
    layer.name = "L3 indirect";
    HeadSpec load = address_head(L.load_temp, L.pos, cfg.ell);
    for (int i = 0; i < N; ++i) load.v.emplace_back(L.scr_min + i, L.mem + i, 2.0);
    layer.heads.push_back(make_head(d, load));
    HeadSpec find = address_head(L.find_temp, L.mem, N);
    for (int i = 0; i < N; ++i) find.v.emplace_back(L.scr_min + i, L.tags + i, 2.0);
    layer.heads.push_back(make_head(d, find));

    FfnBuilder f;
    for (int i = 0; i < N; ++i) detail::snap_rows(f, "snap_scratch", L.scr_sub + i);
    for (int i = 0; i < N; ++i) detail::snap_rows(f, "snap_scratch", L.scr_min + i);
    for (int i = 0; i < N; ++i) clear_rows(f, "clear_temps", L.find_temp + i, L.find_temp + i);
    for (int i = 0; i < cfg.ell; ++i) clear_rows(f, "clear_temps", L.load_temp + i, L.load_temp + i);
    f.finish(layer, d);
    return layer;
}

Layer build_subtract_layer(const MachineConfig& cfg) {
    const Gates g(cfg);
    const auto& L = g.L;
    const int d = cfg.d(), N = cfg.nbits;
    Layer layer;
    layer.name = "L4 subtract";
    FfnBuilder f;
    std::vector<Lin> a, b;
    for (int i = 0; i < N; ++i) {
        a.push_back(var(L.scr_min + i));
        b.push_back(var(L.scr_sub + i));
    }
    subtract_rows(f, "subtract", a, b, L.scr_min, g.rho(g.G.word));
    std::vector<std::pair<int, double>> offset;
    for (int i = 0; i < N; ++i) offset.emplace_back(L.scr_min + i, -3.0);
    f.row("subtract", g.register_unit(), offset);
    for (int i = 0; i < N; ++i) clear_rows(f, "clear_scratch", L.scr_sub + i, L.scr_sub + i);
    for (int i = 0; i < N; ++i) clear_rows(f, "clear_scratch", L.scr_min + i, L.scr_min + i);
    f.finish(layer, d);
    return layer;
}

Layer build_write_layer(const MachineConfig& cfg) {
    const Gates g(cfg);
    const auto& L = g.L;
    const int d = cfg.d(), N = cfg.nbits;
    const int t = L.buf_a;  // write staging rows
    Layer layer;
    layer.name = "L5 write";
    HeadSpec h1 = address_head(L.addr_b, L.pos, cfg.ell);
    HeadSpec h2 = address_head(L.addr_c, L.pos, cfg.ell);
    for (int i = 0; i < N; ++i) {
        h1.v.emplace_back(t + i, L.scr_min + i, 1.0);
        h2.v.emplace_back(t + i, L.buf_c + i, 1.0);
    }
    layer.heads.push_back(make_head(d, h1));
    layer.heads.push_back(make_head(d, h2));

    FfnBuilder f;
    const Lin only_data = var(L.ind, -g.G.word);
    for (int i = 0; i < N; ++i) {
        const int mem = L.mem + i;
        f.row("write", var(t + i, 2.0).add(mem, -1.0).k(-1.0) + only_data, {{mem, 2.0}});
        f.row("write", var(t + i, -2.0).add(mem, 1.0).k(-1.0) + only_data, {{mem, -2.0}});
        clear_rows(f, "clear", t + i, t + i);
        clear_rows(f, "clear", L.buf_c + i, L.buf_c + i);
    }
    f.finish(layer, d);
    return layer;
}

Layer build_flag_layer(const MachineConfig& cfg) {
    const Gates g(cfg);
    const auto& L = g.L;
    const int d = cfg.d(), N = cfg.nbits, l = cfg.ell;
    const double G = g.G.word;
    Layer layer;
    layer.name = "L6 flag";
    FfnBuilder f;

    // PC + 1 as PC - (-1), into load_temp.
    std::vector<Lin> a, b;
    for (int i = 0; i < l; ++i) {
        a.push_back(var(L.pc + i));
        b.push_back(Lin{}.k(1.0));
    }
    subtract_rows(f, "pc_increment", a, b, L.load_temp, g.rho(g.G.addr));

    const int F = L.find_temp;
    const Lin neg = var(L.scr_min);
    Lin zero;
    for (int i = 0; i < N; ++i) zero.add(L.scr_min + i, -1.0);
    zero.k(-N + 1);
    const Lin ext = g.subleq_measure().scaled(-G);
    f.row("branch_flag", neg, {{F, 2.0}});
    f.row("branch_flag", zero, {{F, 2.0}});
    f.row("branch_flag", neg + ext, {{F, -2.0}});
    f.row("branch_flag", zero + ext, {{F, -2.0}});
    f.row("branch_flag", g.opcode_unit(0), {{F, 4.0}});
    f.row("branch_flag", g.opcode_unit(11), {{F, 4.0}});
    f.row("branch_flag", zero + g.opcode(12, G), {{F, 2.0}});
    f.row("branch_flag", g.opcode_unit(13), {{F, 4.0}});
    f.row("branch_flag", zero + g.opcode(13, G), {{F, -2.0}});
    f.row("branch_flag", neg + g.opcode(14, G), {{F, 2.0}});

    std::vector<std::pair<int, double>> offsets{{F, -1.0}};
    for (int i = 0; i < l; ++i) offsets.emplace_back(L.load_temp + i, -3.0);
    f.row("branch_flag", g.register_unit(), offsets);
    f.finish(layer, d);
    return layer;
}

Layer build_branch_layer(const MachineConfig& cfg) {
    const Gates g(cfg);
    const auto& L = g.L;
    const int d = cfg.d(), N = cfg.nbits, l = cfg.ell;
    const int F = L.find_temp;
    Layer layer;
    layer.name = "L7 branch";
    FfnBuilder f;
    std::vector<std::pair<int, double>> offsets;
    for (int i = 0; i < l; ++i) {
        f.row("select", var(L.addr_c + i).add(F, 1.0).k(-1.0), {{L.pc + i, 2.0}});
        f.row("select", var(L.load_temp + i).add(F, -1.0).k(-1.0), {{L.pc + i, 2.0}});
        offsets.emplace_back(L.pc + i, -1.0);
    }
    f.row("select", g.register_unit(), offsets);
    for (int i = 0; i < l; ++i) clear_rows(f, "clear", L.pc + i, L.pc + i);
    for (int i = 0; i < l; ++i) clear_rows(f, "clear", L.load_temp + i, L.load_temp + i);
    clear_rows(f, "clear", F, F);
    for (int i = 0; i < N; ++i) clear_rows(f, "clear", L.scr_min + i, L.scr_min + i);
    f.finish(layer, d);
    return layer;
}

Layer build_correct_layer(const MachineConfig& cfg) {
    const RowLayout L(cfg);
    Layer layer;
    layer.name = "L8 correct";
    FfnBuilder f;
    for (int i = 0; i < cfg.nbits; ++i) detail::snap_rows(f, "snap_memory", L.mem + i);
    for (int i = 0; i < cfg.ell; ++i) detail::snap_rows(f, "snap_pc", L.pc + i);
    f.finish(layer, cfg.d());
    return layer;
}

Model build_model(const MachineConfig& cfg) {
    cfg.validate();
    Model m;
    m.cfg = cfg;
    m.layers.push_back(build_fetch_layer(cfg));
    m.layers.push_back(build_route_layer(cfg));
    m.layers.push_back(build_indirect_layer(cfg));
    m.layers.push_back(build_subtract_layer(cfg));
    m.layers.push_back(build_write_layer(cfg));
    m.layers.push_back(build_flag_layer(cfg));
    m.layers.push_back(build_branch_layer(cfg));
    m.layers.push_back(build_correct_layer(cfg));
    return m;
}

}  // namespace loom
