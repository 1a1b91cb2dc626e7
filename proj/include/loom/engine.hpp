// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "loom/state.hpp"
#include "loom/weights.hpp"

namespace loom {

class NumericFault : public Error {
public:
    using Error::Error;
};

// Called with (layer, head, raw scores) where scores are n x n, entry (i, j)
// scoring key column i for query column j before the lambda scale.
using ScoreHook = std::function<void(int, int, const Eigen::MatrixXd&)>;

struct StepInfo {
    double pre_correction_drift = 0.0;  // memory and PC rows, before L8
};

struct RunReport {
    std::uint64_t steps = 0;
    bool halted = false;
    double max_drift = 0.0;
    std::optional<std::string> fault;  // numeric or decode problem
};

class Engine {
public:
    virtual ~Engine() = default;
    virtual const MachineConfig& config() const = 0;
    // One forward pass through all eight layers. Throws NumericFault when a
    // persistent entry is not exactly +-1 afterwards.
    virtual StepInfo step(State& st) = 0;
    virtual std::string name() const = 0;

    // Steps until the PC reads 0 or max_steps is reached.
    RunReport run(State& st, std::uint64_t max_steps);
};

class DenseEngine : public Engine {
public:
    explicit DenseEngine(Model model);
    const MachineConfig& config() const override { return model_.cfg; }
    StepInfo step(State& st) override;
    std::string name() const override { return "dense"; }
    const Model& model() const { return model_; }
    void set_score_hook(ScoreHook h) { hook_ = std::move(h); }

    // Applies a single layer in place (exposed for layer tests).
    void apply_layer(int index, Eigen::MatrixXd& X) const;

private:
    Model model_;
    ScoreHook hook_;
};

// Throws NumericFault unless persistent rows are exactly bipolar.
void check_persistent(const State& st, double tol = 1e-9);

}  // namespace loom
