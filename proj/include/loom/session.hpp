// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "loom/engine.hpp"
#include "loom/isa.hpp"

namespace loom {

enum class EngineKind { Interp, Dense, Sparse };

std::optional<EngineKind> engine_kind_from_name(const std::string& name);
const char* engine_kind_name(EngineKind kind);

// Engines keep scratch buffers, so callers sharing one hold its lock while
// stepping.
struct SharedEngine {
    std::unique_ptr<Engine> engine;
    std::mutex lock;
};

std::shared_ptr<SharedEngine> make_engine(const MachineConfig& cfg, EngineKind kind);

// Builds each (profile, engine) pair once.
class EnginePool {
public:
    std::shared_ptr<SharedEngine> get(const MachineConfig& cfg, EngineKind kind);

private:
    std::mutex mu_;
    std::map<std::pair<std::string, int>, std::shared_ptr<SharedEngine>> cache_;
};

struct Patch {
    int slot = 0;
    std::int64_t value = 0;
};

struct TickReport {
    std::uint64_t steps = 0;
    bool halted = false;
    double max_drift = 0.0;
    std::optional<std::string> fault;
};

// A program with persistent memory driven tick by tick: each tick applies
// input patches, restarts at the entry point if the last tick halted, then
// runs until HALT or the step budget.
class Session {
public:
    Session(const MachineConfig& cfg, Program program, EngineKind kind, std::shared_ptr<SharedEngine> engine = {});

    TickReport tick(const std::vector<Patch>& patches, std::uint64_t max_steps);
    // Back to the boot image.
    void reset();

    std::vector<std::int64_t> memory() const;
    int pc() const;
    bool halted() const { return pc() == 0; }
    std::uint64_t total_steps() const { return total_steps_; }

    EngineKind kind() const { return kind_; }
    const MachineConfig& config() const { return cfg_; }
    const Program& program() const { return program_; }
    // State matrix for transformer engines, null for the interpreter.
    const State* matrix() const { return state_ ? &*state_ : nullptr; }

private:
    MachineConfig cfg_;
    Program program_;
    EngineKind kind_;
    std::shared_ptr<SharedEngine> engine_;
    std::optional<Interpreter> interp_;
    std::optional<State> state_;
    std::uint64_t total_steps_ = 0;
};

// Input script lines: "tick <k> slot <x> value <v>", '#' comments.
std::map<std::uint64_t, std::vector<Patch>> parse_input_script(std::istream& in);

}  // namespace loom
