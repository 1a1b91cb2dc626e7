// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "loom/config.hpp"
#include "loom/program.hpp"

namespace loom {

// X is d x n. The indicator row is 1 on the s scratch columns. Column 0 holds the registers (PC, scratch, addresses,
// buffers, temps); columns 1..s-1 are scratch columns with only a position
// code; memory slot x is column s+x; instruction k is column s+m+k.
struct State {
    MachineConfig cfg;
    RowLayout L;
    Eigen::MatrixXd X;

    explicit State(const MachineConfig& c) : cfg(c), L(c), X(Eigen::MatrixXd::Zero(L.d, c.n)) {}
};

State init_state(const MachineConfig& cfg, const Program& program);

std::vector<std::int64_t> read_memory(const State& st);
std::int64_t read_memory_slot(const State& st, int x);
void write_memory(State& st, int x, std::int64_t value);
int read_pc(const State& st);
void write_pc(State& st, int pc);

struct AuditReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Checks structural invariants: indicator, position codes, tags, commands,
// bipolar memory and PC, registers zero outside column 0.
AuditReport audit_state(const State& st, double tol = 1e-6);

// Largest distance from +-1 over memory rows of memory columns and the PC.
double persistent_drift(const State& st);

}  // namespace loom
