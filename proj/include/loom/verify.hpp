// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "loom/engine.hpp"
#include "loom/isa.hpp"

namespace loom {

struct LockstepReport {
    bool ok = true;
    std::uint64_t steps = 0;
    bool halted = false;
    double max_drift = 0.0;
    std::optional<std::uint64_t> divergence;  // step index of the first mismatch
    std::string detail;
};

// Steps the engine and the interpreter side by side from their current
// states, comparing PC and every memory slot after each step. Stops at the
// first mismatch, at halt, or after max_steps.
LockstepReport lockstep_continue(Engine& engine, State& st, Interpreter& ref, std::uint64_t max_steps);

// Same, starting both from the program's boot state.
LockstepReport lockstep(Engine& engine, const Program& program, std::uint64_t max_steps);

}  // namespace loom
