// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "loom/config.hpp"
#include "loom/program.hpp"

namespace loom {

enum class Opcode : int {
    HALT = 0,
    MOV = 1,
    ADD = 2,
    INC = 3,
    DEC = 4,
    SUB = 5,
    SHL = 6,
    SHR = 7,
    AND = 8,
    OR = 9,
    XOR = 10,
    JMP = 11,
    JZ = 12,
    JNZ = 13,
    CMP = 14,
    LOAD = 15,
    FIND = 16,
    SWAP = 17,
    CMOV = 18,
    MULACC = 19,
    STORE = 20,
    SUBLEQ = -1,
};

inline constexpr int kExtendedOpcodes = 21;

const char* opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(const std::string& name);
std::vector<Opcode> all_extended_opcodes();

// a >= s selects SUBLEQ; otherwise a is the opcode number.
inline Opcode decode_opcode(const Instruction& ins, int s) {
    return ins.a >= s ? Opcode::SUBLEQ : static_cast<Opcode>(ins.a);
}

enum class FaultKind { None, Pointer, Find, Control, Operand, Illegal };

const char* fault_name(FaultKind k);

class MachineFault : public Error {
public:
    MachineFault(FaultKind kind, int pc, const std::string& what) : Error(what), kind_(kind), pc_(pc) {}
    FaultKind kind() const { return kind_; }
    int pc() const { return pc_; }

private:
    FaultKind kind_;
    int pc_;
};

struct MachineState {
    std::vector<std::int64_t> memory;  // signed, wrapped to N bits
    int pc = 0;
    bool halted() const { return pc == 0; }
};

struct Write {
    int slot;
    std::int64_t before;
    std::int64_t after;
};

struct StepRecord {
    std::uint64_t step = 0;
    int pc = 0;
    Opcode op = Opcode::HALT;
    Instruction ins;
    std::vector<Write> writes;
    int next_pc = 0;
};

std::string format_trace_line(const StepRecord& r);

class Interpreter {
public:
    Interpreter(const MachineConfig& cfg, const Program& program);

    const MachineConfig& config() const { return cfg_; }
    const Program& program() const { return program_; }
    MachineState& state() { return state_; }
    const MachineState& state() const { return state_; }

    // Executes one instruction. Throws MachineFault. No-op when halted.
    StepRecord step();

    // Restarts at the entry point, keeping memory.
    void restart() { state_.pc = program_.entry(); }
    void reset();

private:
    std::int64_t read(int col, int pc) const;
    void write(int col, std::int64_t v, int pc, StepRecord& rec);
    int slot_of_pointer(std::int64_t v, int pc) const;

    MachineConfig cfg_;
    Program program_;
    MachineState state_;
    std::uint64_t steps_ = 0;
};

enum class RunStatus { Halted, StepLimit, Fault };

struct RunResult {
    RunStatus status = RunStatus::Halted;
    std::uint64_t steps = 0;
    MachineState final_state;
    std::optional<MachineFault> fault;
    std::vector<StepRecord> trace;  // filled only when requested
};

// Called before each step with the step index; may patch memory.
using InputHook = std::function<void(std::uint64_t step, MachineState&)>;

RunResult run_program(const MachineConfig& cfg, const Program& program, std::uint64_t max_steps,
                      bool keep_trace = false, const InputHook& hook = {});

// Structural checks that keep the interpreter and the transformer in
// agreement: HALT targets 0, operands fit in ell bits, b of writing opcodes
// is a memory column, branch targets are instruction columns or 0.
std::vector<std::string> validate_program(const MachineConfig& cfg, const Program& program);

// Pure word semantics shared with tests: returns the value written to b.
std::int64_t alu(Opcode op, std::int64_t b, std::int64_t c, int nbits);

}  // namespace loom
