// SPDX-License-Identifier: Apache-2.0
#include "loom/isa.hpp"

#include <array>
#include <sstream>

#include "loom/bipolar.hpp"

namespace loom {

namespace {

constexpr std::array<const char*, kExtendedOpcodes> kNames = {
    "HALT", "MOV", "ADD", "INC", "DEC", "SUB", "SHL",  "SHR",  "AND",    "OR",   "XOR",
    "JMP",  "JZ",  "JNZ", "CMP", "LOAD", "FIND", "SWAP", "CMOV", "MULACC", "STORE"};

}  // namespace

const char* opcode_name(Opcode op) {
    if (op == Opcode::SUBLEQ) return "SUBLEQ";
    const int k = static_cast<int>(op);
    return k >= 0 && k < kExtendedOpcodes ? kNames[static_cast<std::size_t>(k)] : "ILLEGAL";
}

std::optional<Opcode> opcode_from_name(const std::string& name) {
    if (name == "SUBLEQ") return Opcode::SUBLEQ;
    for (int k = 0; k < kExtendedOpcodes; ++k) {
        if (name == kNames[static_cast<std::size_t>(k)]) return static_cast<Opcode>(k);
    }
    return std::nullopt;
}

std::vector<Opcode> all_extended_opcodes() {
    std::vector<Opcode> out;
    for (int k = 0; k < kExtendedOpcodes; ++k) out.push_back(static_cast<Opcode>(k));
    return out;
}

const char* fault_name(FaultKind k) {
    switch (k) {
        case FaultKind::None: return "none";
        case FaultKind::Pointer: return "pointer";
        case FaultKind::Find: return "find";
        case FaultKind::Control: return "control";
        case FaultKind::Operand: return "operand";
        case FaultKind::Illegal: return "illegal";
    }
    return "?";
}

std::string format_trace_line(const StepRecord& r) {
    std::ostringstream os;
    os << "step=" << r.step << " pc=" << r.pc << " op=" << opcode_name(r.op) << " a=" << r.ins.a
       << " b=" << r.ins.b << " c=" << r.ins.c << " writes=[";
    for (std::size_t i = 0; i < r.writes.size(); ++i) {
        if (i) os << ",";
        os << r.writes[i].slot << ":" << r.writes[i].before << "->" << r.writes[i].after;
    }
    os << "] next=" << r.next_pc;
    return os.str();
}

std::int64_t alu(Opcode op, std::int64_t b, std::int64_t c, int nbits) {
    const std::uint64_t ub = wrap_unsigned(b, nbits);
    const std::uint64_t uc = wrap_unsigned(c, nbits);
    std::int64_t r = 0;
    switch (op) {
        case Opcode::MOV: r = c; break;
        case Opcode::ADD: r = b + c; break;
        case Opcode::INC: r = b + 1; break;
        case Opcode::DEC: r = b - 1; break;
        case Opcode::SUB: r = b - c; break;
        case Opcode::SHL: r = static_cast<std::int64_t>(ub << 1); break;
        case Opcode::SHR: r = wrap_signed(b, nbits) >> 1; break;
        case Opcode::AND: r = static_cast<std::int64_t>(ub & uc); break;
        case Opcode::OR: r = static_cast<std::int64_t>(ub | uc); break;
        case Opcode::XOR: r = static_cast<std::int64_t>(ub ^ uc); break;
        case Opcode::CMOV: r = wrap_signed(b, nbits) < 0 ? c : b; break;
        case Opcode::MULACC:
            r = static_cast<std::int64_t>(ub << 1) + (wrap_signed(b, nbits) < 0 ? c : 0);
            break;
        default: throw Error(std::string("alu: no word semantics for ") + opcode_name(op));
    }
    return wrap_signed(r, nbits);
}

Interpreter::Interpreter(const MachineConfig& cfg, const Program& program) : cfg_(cfg), program_(program) {
    cfg_.validate();
    program_.require_matches(cfg_);
    reset();
}

void Interpreter::reset() {
    state_.memory = program_.memory;
    for (auto& v : state_.memory) v = wrap_signed(v, cfg_.nbits);
    state_.pc = program_.entry();
    steps_ = 0;
}

std::int64_t Interpreter::read(int col, int pc) const {
    if (col < cfg_.s || col >= cfg_.instr_begin()) {
        throw MachineFault(FaultKind::Operand, pc, "operand column " + std::to_string(col) + " is not memory");
    }
    return state_.memory[static_cast<std::size_t>(col - cfg_.s)];
}

void Interpreter::write(int col, std::int64_t v, int pc, StepRecord& rec) {
    if (col < cfg_.s || col >= cfg_.instr_begin()) {
        throw MachineFault(FaultKind::Operand, pc, "write to non-memory column " + std::to_string(col));
    }
    auto& cell = state_.memory[static_cast<std::size_t>(col - cfg_.s)];
    const std::int64_t nv = wrap_signed(v, cfg_.nbits);
    rec.writes.push_back({col - cfg_.s, cell, nv});
    cell = nv;
}

int Interpreter::slot_of_pointer(std::int64_t v, int pc) const {
    const auto u = wrap_unsigned(v, cfg_.nbits);
    if (u >= static_cast<std::uint64_t>(cfg_.m)) {
        throw MachineFault(FaultKind::Pointer, pc, "pointer " + std::to_string(u) + " outside memory");
    }
    return static_cast<int>(u);
}

StepRecord Interpreter::step() {
    StepRecord rec;
    const int pc = state_.pc;
    rec.step = steps_;
    rec.pc = pc;
    if (pc == 0) {
        rec.next_pc = 0;
        return rec;
    }
    if (pc < cfg_.instr_begin() || pc >= cfg_.n) {
        throw MachineFault(FaultKind::Control, pc, "pc " + std::to_string(pc) + " outside instruction region");
    }
    const std::size_t k = static_cast<std::size_t>(pc - cfg_.instr_begin());
    const Instruction ins = k < program_.code.size() ? program_.code[k] : Instruction{};
    const Opcode op = decode_opcode(ins, cfg_.s);
    rec.ins = ins;
    rec.op = op;
    int next = (pc + 1) % cfg_.n;
    const int N = cfg_.nbits;

    switch (op) {
        case Opcode::SUBLEQ: {
            const auto r = wrap_signed(read(ins.b, pc) - read(ins.a, pc), N);
            write(ins.b, r, pc, rec);
            if (r <= 0) next = ins.c;
            break;
        }
        case Opcode::HALT:
            if (ins.c != 0) throw MachineFault(FaultKind::Illegal, pc, "HALT with nonzero target");
            next = 0;
            break;
        case Opcode::MOV:
            write(ins.b, read(ins.c, pc), pc, rec);
            break;
        case Opcode::INC:
        case Opcode::DEC:
        case Opcode::SHL:
        case Opcode::SHR:
            write(ins.b, alu(op, read(ins.b, pc), 0, N), pc, rec);
            break;
        case Opcode::ADD:
        case Opcode::SUB:
        case Opcode::AND:
        case Opcode::OR:
        case Opcode::XOR:
        case Opcode::MULACC:
            write(ins.b, alu(op, read(ins.b, pc), read(ins.c, pc), N), pc, rec);
            break;
        case Opcode::CMOV: {
            const auto b = read(ins.b, pc);
            if (b < 0) write(ins.b, read(ins.c, pc), pc, rec);
            break;
        }
        case Opcode::JMP: next = ins.c; break;
        case Opcode::JZ:
            if (read(ins.b, pc) == 0) next = ins.c;
            break;
        case Opcode::JNZ:
            if (read(ins.b, pc) != 0) next = ins.c;
            break;
        case Opcode::CMP:
            if (read(ins.b, pc) < 0) next = ins.c;
            break;
        case Opcode::LOAD: {
            const int p = slot_of_pointer(read(ins.c, pc), pc);
            write(ins.b, state_.memory[static_cast<std::size_t>(p)], pc, rec);
            break;
        }
        case Opcode::STORE: {
            const int p = slot_of_pointer(read(ins.c, pc), pc);
            write(cfg_.s + p, read(ins.b, pc), pc, rec);
            break;
        }
        case Opcode::FIND: {
            const auto v = read(ins.c, pc);
            int hit = -1, count = 0;
            for (int x = 0; x < cfg_.m; ++x) {
                if (state_.memory[static_cast<std::size_t>(x)] == v) {
                    hit = x;
                    ++count;
                }
            }
            if (count != 1) {
                throw MachineFault(FaultKind::Find, pc,
                                   "FIND matched " + std::to_string(count) + " slots for value " + std::to_string(v));
            }
            write(ins.b, hit, pc, rec);
            break;
        }
        case Opcode::SWAP: {
            const auto b = read(ins.b, pc);
            const auto c = read(ins.c, pc);
            write(ins.b, c, pc, rec);
            write(ins.c, b, pc, rec);
            break;
        }
        default:
            throw MachineFault(FaultKind::Illegal, pc, "undefined opcode " + std::to_string(ins.a));
    }
    rec.next_pc = next;
    state_.pc = next;
    ++steps_;
    return rec;
}

RunResult run_program(const MachineConfig& cfg, const Program& program, std::uint64_t max_steps,
                      bool keep_trace, const InputHook& hook) {
    Interpreter it(cfg, program);
    RunResult res;
    try {
        while (!it.state().halted()) {
            if (res.steps >= max_steps) {
                res.status = RunStatus::StepLimit;
                res.final_state = it.state();
                return res;
            }
            if (hook) hook(res.steps, it.state());
            auto rec = it.step();
            ++res.steps;
            if (keep_trace) res.trace.push_back(std::move(rec));
        }
        res.status = RunStatus::Halted;
    } catch (const MachineFault& f) {
        res.status = RunStatus::Fault;
        res.fault = f;
    }
    res.final_state = it.state();
    return res;
}

std::vector<std::string> validate_program(const MachineConfig& cfg, const Program& program) {
    std::vector<std::string> errs;
    if (!program.matches(cfg)) {
        errs.push_back("program header does not match machine " + cfg.name());
        return errs;
    }
    if (static_cast<int>(program.code.size()) > cfg.instr_slots()) {
        errs.push_back("program needs " + std::to_string(program.code.size()) + " instruction slots, machine has " +
                       std::to_string(cfg.instr_slots()));
    }
    const auto is_mem = [&](int col) { return col >= cfg.s && col < cfg.instr_begin(); };
    const auto is_target = [&](int col) { return col == 0 || (col >= cfg.instr_begin() && col < cfg.n); };
    for (std::size_t k = 0; k < program.code.size(); ++k) {
        const auto& ins = program.code[k];
        const std::string where = "instruction " + std::to_string(k) + ": ";
        if (ins.a < 0 || ins.a >= cfg.n || ins.b < 0 || ins.b >= cfg.n || ins.c < 0 || ins.c >= cfg.n) {
            errs.push_back(where + "operand outside [0, n)");
            continue;
        }
        const Opcode op = decode_opcode(ins, cfg.s);
        if (op != Opcode::SUBLEQ && static_cast<int>(op) >= kExtendedOpcodes) {
            errs.push_back(where + "undefined opcode " + std::to_string(ins.a));
            continue;
        }
        switch (op) {
            case Opcode::SUBLEQ:
                if (!is_mem(ins.a) || !is_mem(ins.b)) errs.push_back(where + "SUBLEQ operands must be memory");
                if (!is_target(ins.c)) errs.push_back(where + "branch target is not an instruction");
                break;
            case Opcode::HALT:
            case Opcode::JMP:
                if (ins.b != 0 && !is_mem(ins.b)) errs.push_back(where + "b must be 0 or memory");
                if (op == Opcode::HALT && ins.c != 0) errs.push_back(where + "HALT requires c = 0");
                if (op == Opcode::JMP && !is_target(ins.c)) errs.push_back(where + "branch target is not an instruction");
                break;
            case Opcode::JZ:
            case Opcode::JNZ:
            case Opcode::CMP:
                if (!is_mem(ins.b)) errs.push_back(where + "tested operand must be memory");
                if (!is_target(ins.c)) errs.push_back(where + "branch target is not an instruction");
                break;
            case Opcode::INC:
            case Opcode::DEC:
            case Opcode::SHL:
            case Opcode::SHR:
                if (!is_mem(ins.b)) errs.push_back(where + "b must be memory");
                break;
            default:
                if (!is_mem(ins.b) || !is_mem(ins.c)) errs.push_back(where + "b and c must be memory");
                break;
        }
    }
    return errs;
}

}  // namespace loom
