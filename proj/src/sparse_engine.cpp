// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "loom/sparse.hpp"

namespace loom {

SparseEngine::SparseEngine(const SparseModel& model) : cfg_(model.cfg) {
    cfg_.validate();
    for (const auto& sl : model.layers) {
        CompiledLayer cl;
        for (const auto& h : sl.heads) {
            CompiledHead ch;
            ch.q.resize(h.Q.rows);
            for (const auto& t : h.Q.entries) ch.q[t.row].emplace_back(static_cast<int>(t.col), t.value);
            for (const auto& t : h.V.entries) ch.v.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.value);
            cl.heads.push_back(std::move(ch));
        }
        cl.w1.resize(sl.W1.rows);
        for (const auto& t : sl.W1.entries) cl.w1[t.row].emplace_back(static_cast<int>(t.col), t.value);
        cl.b1.assign(sl.b1.rows, 0.0);
        for (const auto& t : sl.b1.entries) cl.b1[t.row] += t.value;
        cl.w2.resize(sl.W2.cols);
        for (const auto& t : sl.W2.entries) cl.w2[t.col].emplace_back(static_cast<int>(t.row), t.value);
        cl.b2.assign(sl.b2.rows, 0.0);
        for (const auto& t : sl.b2.entries) cl.b2[t.row] += t.value;
        layers_.push_back(std::move(cl));
    }
}

void SparseEngine::apply(const CompiledLayer& layer, RowMat& X) {
    const Eigen::Index n = X.cols();
    const double lambda = cfg_.lambda;
    if (!layer.heads.empty()) {
        RowMat A = X;
        for (const auto& head : layer.heads) {
            const auto r = static_cast<Eigen::Index>(head.q.size());
            q_.setZero(r, n);
            for (Eigen::Index k = 0; k < r; ++k) {
                for (const auto& [col, w] : head.q[static_cast<std::size_t>(k)]) q_.row(k) += w * X.row(col);
            }
            scores_.noalias() = q_.transpose() * q_;
            for (Eigen::Index j = 0; j < n; ++j) {
                double* s = scores_.col(j).data();
                Eigen::Map<Eigen::VectorXd> col(s, n);
                const double b1 = col.maxCoeff();
                const Eigen::Index i1 = std::find(s, s + n, b1) - s;
                s[i1] = -INFINITY;
                const double b2 = col.maxCoeff();
                const Eigen::Index i2 = std::find(s, s + n, b2) - s;
                const double w1 = 1.0 / (1.0 + std::exp(-lambda * (b1 - b2)));
                const double w2 = 1.0 - w1;
                for (const auto& [dst, src, w] : head.v) A(dst, j) += w * (w1 * X(src, i1) + w2 * X(src, i2));
            }
        }
        X = std::move(A);
    }
    const auto r = static_cast<Eigen::Index>(layer.w1.size());
    hidden_.resize(r, n);
    for (Eigen::Index k = 0; k < r; ++k) {
        auto h = hidden_.row(k);
        h.setConstant(layer.b1[static_cast<std::size_t>(k)]);
        for (const auto& [col, w] : layer.w1[static_cast<std::size_t>(k)]) h += w * X.row(col);
        h = h.cwiseMax(0.0);
    }
    for (Eigen::Index k = 0; k < r; ++k) {
        for (const auto& [dst, w] : layer.w2[static_cast<std::size_t>(k)]) X.row(dst) += w * hidden_.row(k);
    }
    for (std::size_t i = 0; i < layer.b2.size(); ++i) {
        if (layer.b2[i] != 0.0) X.row(static_cast<Eigen::Index>(i)).array() += layer.b2[i];
    }
}

StepInfo SparseEngine::step(State& st) {
    if (!(st.cfg == cfg_)) throw ConfigError("state and model configurations differ");
    StepInfo info;
    RowMat X = st.X;
    const std::size_t last = layers_.size() - 1;
    for (std::size_t i = 0; i < last; ++i) apply(layers_[i], X);
    st.X = X;
    info.pre_correction_drift = persistent_drift(st);
    apply(layers_[last], X);
    st.X = X;
    check_persistent(st);
    return info;
}

}  // namespace loom
