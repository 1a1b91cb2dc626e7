// SPDX-License-Identifier: Apache-2.0
#include "loom/verify.hpp"

#include <sstream>

namespace loom {

LockstepReport lockstep_continue(Engine& engine, State& st, Interpreter& ref, std::uint64_t max_steps) {
    LockstepReport res;
    std::uint64_t index = 0;
    try {
        while (res.steps < max_steps && !ref.state().halted()) {
            const auto rec = ref.step();
            index = rec.step;
            const auto info = engine.step(st);
            res.max_drift = std::max(res.max_drift, info.pre_correction_drift);
            ++res.steps;
            const int pc = read_pc(st);
            const auto mem = read_memory(st);
            if (pc != ref.state().pc || mem != ref.state().memory) {
                std::ostringstream os;
                os << "diverged at step " << rec.step << " (" << format_trace_line(rec) << "): " << engine.name()
                   << " pc=" << pc;
                for (std::size_t x = 0; x < mem.size(); ++x) {
                    if (mem[x] != ref.state().memory[x]) {
                        os << " mem[" << x << "]=" << mem[x] << " want " << ref.state().memory[x];
                    }
                }
                res.ok = false;
                res.divergence = rec.step;
                res.detail = os.str();
                return res;
            }
        }
    } catch (const std::exception& e) {
        res.ok = false;
        res.divergence = index;
        res.detail = "error after " + std::to_string(res.steps) + " steps: " + e.what();
        return res;
    }
    res.halted = ref.state().halted();
    return res;
}

LockstepReport lockstep(Engine& engine, const Program& program, std::uint64_t max_steps) {
    State st = init_state(engine.config(), program);
    Interpreter ref(engine.config(), program);
    return lockstep_continue(engine, st, ref, max_steps);
}

}  // namespace loom
