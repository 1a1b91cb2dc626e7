// SPDX-License-Identifier: Apache-2.0
#include "loom/sparse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace loom {

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& m) {
    SparseMatrix s;
    s.rows = static_cast<std::uint32_t>(m.rows());
    s.cols = static_cast<std::uint32_t>(m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) {
                s.entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), m(i, j)});
            }
        }
    }
    return s;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    for (const auto& t : entries) m(t.row, t.col) += t.value;
    return m;
}

SparseModel SparseModel::from_model(const Model& m) {
    SparseModel s;
    s.cfg = m.cfg;
    for (const auto& layer : m.layers) {
        SparseLayer sl;
        sl.name = layer.name;
        for (const auto& h : layer.heads) sl.heads.push_back({SparseMatrix::from_dense(h.Q), SparseMatrix::from_dense(h.V)});
        sl.W1 = SparseMatrix::from_dense(layer.W1);
        sl.b1 = SparseMatrix::from_dense(layer.b1);
        sl.W2 = SparseMatrix::from_dense(layer.W2);
        sl.b2 = SparseMatrix::from_dense(layer.b2);
        s.layers.push_back(std::move(sl));
    }
    return s;
}

Model SparseModel::to_model() const {
    Model m;
    m.cfg = cfg;
    for (const auto& sl : layers) {
        Layer layer;
        layer.name = sl.name;
        for (const auto& h : sl.heads) layer.heads.push_back({h.Q.to_dense(), h.V.to_dense()});
        layer.W1 = sl.W1.to_dense();
        layer.b1 = sl.b1.to_dense().col(0);
        layer.W2 = sl.W2.to_dense();
        layer.b2 = sl.b2.to_dense().col(0);
        layer.row_group.assign(static_cast<std::size_t>(layer.W1.rows()), "");
        m.layers.push_back(std::move(layer));
    }
    return m;
}

std::uint64_t SparseModel::nonzero_count() const {
    std::uint64_t total = 0;
    for (const auto& l : layers) {
        for (const auto& h : l.heads) total += 2 * h.Q.entries.size() + h.V.entries.size();
        total += l.W1.entries.size() + l.b1.entries.size() + l.W2.entries.size() + l.b2.entries.size();
    }
    return total;
}

namespace {

constexpr char kMagic[8] = {'L', 'O', 'O', 'M', 'W', 'G', 'T', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw FormatError("truncated weight file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

void put_matrix(std::ostream& out, const SparseMatrix& m) {
    put<std::uint32_t>(out, m.rows);
    put<std::uint32_t>(out, m.cols);
    put<std::uint64_t>(out, m.entries.size());
    for (const auto& t : m.entries) {
        put<std::uint32_t>(out, t.row);
        put<std::uint32_t>(out, t.col);
        put<double>(out, t.value);
    }
}

SparseMatrix get_matrix(std::istream& in, std::uint32_t max_dim) {
    SparseMatrix m;
    m.rows = get<std::uint32_t>(in);
    m.cols = get<std::uint32_t>(in);
    if (m.rows > max_dim || m.cols > max_dim) throw FormatError("matrix dimensions out of range");
    const auto count = get<std::uint64_t>(in);
    if (count > static_cast<std::uint64_t>(m.rows) * m.cols) throw FormatError("too many entries");
    m.entries.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        Triplet t{get<std::uint32_t>(in), get<std::uint32_t>(in), get<double>(in)};
        if (t.row >= m.rows || t.col >= m.cols) throw FormatError("entry outside matrix");
        if (!std::isfinite(t.value)) throw FormatError("non-finite weight");
        m.entries.push_back(t);
    }
    return m;
}

}  // namespace

void write_weights(std::ostream& out, const SparseModel& m) {
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kVersion);
    const auto& c = m.cfg;
    for (int v : {c.n, c.ell, c.nbits, c.s, c.m}) put<std::int32_t>(out, v);
    put<double>(out, c.lambda);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.layers.size()));
    for (const auto& l : m.layers) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(l.name.size()));
        out.write(l.name.data(), static_cast<std::streamsize>(l.name.size()));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(l.heads.size()));
        for (const auto& h : l.heads) {
            put_matrix(out, h.Q);
            put_matrix(out, h.V);
        }
        put_matrix(out, l.W1);
        put_matrix(out, l.b1);
        put_matrix(out, l.W2);
        put_matrix(out, l.b2);
    }
}

SparseModel read_weights(std::istream& in) {
    char magic[sizeof(kMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("not a loom weight file");
    }
    if (get<std::uint32_t>(in) != kVersion) throw FormatError("unsupported weight file version");
    SparseModel m;
    m.cfg.n = get<std::int32_t>(in);
    m.cfg.ell = get<std::int32_t>(in);
    m.cfg.nbits = get<std::int32_t>(in);
    m.cfg.s = get<std::int32_t>(in);
    m.cfg.m = get<std::int32_t>(in);
    m.cfg.lambda = get<double>(in);
    m.cfg.validate();
    const auto max_dim = static_cast<std::uint32_t>(std::max(m.cfg.n, 1 << 16));
    const auto layers = get<std::uint32_t>(in);
    if (layers > 64) throw FormatError("too many layers");
    for (std::uint32_t k = 0; k < layers; ++k) {
        SparseLayer l;
        const auto len = get<std::uint32_t>(in);
        if (len > 256) throw FormatError("layer name too long");
        l.name.resize(len);
        if (!in.read(l.name.data(), len)) throw FormatError("truncated weight file");
        const auto heads = get<std::uint32_t>(in);
        if (heads > 64) throw FormatError("too many heads");
        for (std::uint32_t h = 0; h < heads; ++h) {
            SparseHead sh;
            sh.Q = get_matrix(in, max_dim);
            sh.V = get_matrix(in, max_dim);
            l.heads.push_back(std::move(sh));
        }
        l.W1 = get_matrix(in, max_dim);
        l.b1 = get_matrix(in, max_dim);
        l.W2 = get_matrix(in, max_dim);
        l.b2 = get_matrix(in, max_dim);
        const auto d = static_cast<std::uint32_t>(m.cfg.d());
        bool ok = l.W1.cols == d && l.W2.rows == d && l.W2.cols == l.W1.rows && l.b1.rows == l.W1.rows &&
                  l.b2.rows == d && l.b1.cols == 1 && l.b2.cols == 1;
        for (const auto& h : l.heads) ok = ok && h.Q.cols == d && h.V.rows == d && h.V.cols == d;
        if (!ok) throw FormatError("layer '" + l.name + "' has inconsistent shapes");
        m.layers.push_back(std::move(l));
    }
    return m;
}

void save_weights(const std::string& path, const SparseModel& m) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write " + path);
    write_weights(f, m);
}

SparseModel load_weights(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open " + path);
    return read_weights(f);
}

}  // namespace loom
