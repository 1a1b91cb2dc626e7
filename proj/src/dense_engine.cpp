// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "loom/engine.hpp"

namespace loom {

RunReport Engine::run(State& st, std::uint64_t max_steps) {
    RunReport rep;
    try {
        while (rep.steps < max_steps) {
            if (read_pc(st) == 0) {
                rep.halted = true;
                return rep;
            }
            const StepInfo info = step(st);
            rep.max_drift = std::max(rep.max_drift, info.pre_correction_drift);
            ++rep.steps;
        }
        rep.halted = read_pc(st) == 0;
    } catch (const Error& e) {
        rep.fault = e.what();
    }
    return rep;
}

void check_persistent(const State& st, double tol) {
    const auto& cfg = st.cfg;
    const auto& L = st.L;
    auto check = [&](int row, int col) {
        const double v = st.X(row, col);
        if (!std::isfinite(v) || std::fabs(std::fabs(v) - 1.0) > tol) {
            throw NumericFault("persistent entry row " + std::to_string(row) + " col " + std::to_string(col) +
                               " = " + std::to_string(v));
        }
    };
    for (int x = 0; x < cfg.m; ++x) {
        for (int i = 0; i < cfg.nbits; ++i) check(L.mem + i, cfg.s + x);
    }
    for (int i = 0; i < cfg.ell; ++i) check(L.pc + i, 0);
}

DenseEngine::DenseEngine(Model model) : model_(std::move(model)) {}

void DenseEngine::apply_layer(int index, Eigen::MatrixXd& X) const {
    const Layer& layer = model_.layers[static_cast<std::size_t>(index)];
    const double lambda = model_.cfg.lambda;
    if (!layer.heads.empty()) {
        Eigen::MatrixXd A = X;
        for (std::size_t h = 0; h < layer.heads.size(); ++h) {
            const Head& head = layer.heads[h];
            const Eigen::MatrixXd QX = head.Q * X;
            Eigen::MatrixXd S = QX.transpose() * QX;
            if (hook_) hook_(index, static_cast<int>(h), S);
            S *= lambda;
            const Eigen::RowVectorXd mx = S.colwise().maxCoeff();
            S.rowwise() -= mx;
            S = S.array().exp().matrix();
            const Eigen::RowVectorXd sum = S.colwise().sum();
            S.array().rowwise() /= sum.array();
            A.noalias() += (head.V * X) * S;
        }
        X = std::move(A);
    }
    Eigen::MatrixXd H = layer.W1 * X;
    H.colwise() += layer.b1;
    H = H.cwiseMax(0.0);
    X.noalias() += layer.W2 * H;
    X.colwise() += layer.b2;
}

StepInfo DenseEngine::step(State& st) {
    if (!(st.cfg == model_.cfg)) throw ConfigError("state and model configurations differ");
    StepInfo info;
    const int last = static_cast<int>(model_.layers.size()) - 1;
    for (int i = 0; i < last; ++i) apply_layer(i, st.X);
    info.pre_correction_drift = persistent_drift(st);
    apply_layer(last, st.X);
    check_persistent(st);
    return info;
}

}  // namespace loom
