// SPDX-License-Identifier: Apache-2.0
#include "loom/suite.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <regex>
#include <sstream>

#include "loom/compiler.hpp"
#include "loom/isa.hpp"

namespace loom {

namespace {

using Op = Opcode;

// Hand-assembled case. Operands name logical memory slots; branch targets
// name instruction indices.
class Builder {
public:
    Builder(const MachineConfig& cfg, std::string category) : cfg_(cfg), category_(std::move(category)) {}

    int M(int x) const { return cfg_.s + x; }
    int I(int k) const { return cfg_.instr_begin() + k; }
    int last() const { return cfg_.m - 1; }

    struct Ins {
        int a, b, c;
    };
    static Ins op(Op o, int b = 0, int c = 0) { return {static_cast<int>(o), b, c}; }

    void add(const std::string& name, std::initializer_list<std::pair<int, std::int64_t>> mem,
             std::initializer_list<Ins> code, std::initializer_list<std::pair<int, std::int64_t>> expect,
             std::uint64_t max_steps = 64) {
        SuiteCase c;
        c.category = category_;
        c.name = name;
        c.program = Program::empty_for(cfg_);
        for (auto [x, v] : mem) c.program.memory[static_cast<std::size_t>(x)] = v;
        for (auto i : code) c.program.code.push_back({i.a, i.b, i.c});
        for (auto [x, v] : expect) c.expect.push_back({x, v, "mem[" + std::to_string(x) + "]"});
        c.max_steps = max_steps;
        cases.push_back(std::move(c));
    }

    std::vector<SuiteCase> cases;

private:
    MachineConfig cfg_;
    std::string category_;
};

// Slot 8 holds 1 and slot 9 is a marker set only on the fall-through path,
// so branch cases expect mem[9] = 1 when not taken and 0 when taken.
constexpr int kOne = 8;
constexpr int kFlag = 9;

}  // namespace

std::vector<SuiteCase> opcode_cases(const MachineConfig& cfg) {
    Builder b(cfg, "opcode");
    auto M = [&](int x) { return b.M(x); };
    auto I = [&](int k) { return b.I(k); };
    using B = Builder;
    const int last = b.last();
    const std::int64_t last_ptr = last >= 128 ? last - 256 : last;  // as a signed word

    // Branch probe: instruction 0 is the branch, 1 sets the flag, 2 halts.
    auto probe = [&](const std::string& name, std::initializer_list<std::pair<int, std::int64_t>> mem, B::Ins br,
                     std::initializer_list<std::pair<int, std::int64_t>> expect) {
        std::vector<std::pair<int, std::int64_t>> m(mem);
        m.push_back({kOne, 1});
        b.add(name, {}, {br, B::op(Op::MOV, M(kFlag), M(kOne)), B::op(Op::HALT)}, expect);
        for (auto [x, v] : m) b.cases.back().program.memory[static_cast<std::size_t>(x)] = v;
    };

    b.add("halt_immediately", {{0, 7}}, {B::op(Op::HALT)}, {{0, 7}});
    probe("subleq_positive_falls_through", {{0, 9}, {1, 4}}, {M(1), M(0), I(2)}, {{0, 5}, {kFlag, 1}});
    probe("subleq_zero_jumps", {{0, 4}, {1, 4}}, {M(1), M(0), I(2)}, {{0, 0}, {kFlag, 0}});
    probe("subleq_negative_jumps", {{0, 3}, {1, 10}}, {M(1), M(0), I(2)}, {{0, -7}, {kFlag, 0}});
    probe("subleq_overflow_wraps", {{0, -128}, {1, 1}}, {M(1), M(0), I(2)}, {{0, 127}, {kFlag, 1}});
    b.add("mov_positive", {{0, 42}}, {B::op(Op::MOV, M(1), M(0))}, {{1, 42}, {0, 42}});
    b.add("mov_negative", {{0, -100}, {1, 5}}, {B::op(Op::MOV, M(1), M(0))}, {{1, -100}});
    b.add("add_positive", {{0, 5}, {1, 3}}, {B::op(Op::ADD, M(0), M(1))}, {{0, 8}, {1, 3}});
    b.add("add_negative", {{0, -20}, {1, 7}}, {B::op(Op::ADD, M(0), M(1))}, {{0, -13}});
    b.add("add_overflow", {{0, 100}, {1, 100}}, {B::op(Op::ADD, M(0), M(1))}, {{0, -56}});
    b.add("inc_five", {{0, 5}}, {B::op(Op::INC, M(0))}, {{0, 6}});
    b.add("inc_overflow", {{0, 127}}, {B::op(Op::INC, M(0))}, {{0, -128}});
    b.add("dec_zero", {{0, 0}}, {B::op(Op::DEC, M(0))}, {{0, -1}});
    b.add("dec_underflow", {{0, -128}}, {B::op(Op::DEC, M(0))}, {{0, 127}});
    b.add("sub_negative_result", {{0, 5}, {1, 9}}, {B::op(Op::SUB, M(0), M(1))}, {{0, -4}});
    b.add("sub_overflow", {{0, -100}, {1, 100}}, {B::op(Op::SUB, M(0), M(1))}, {{0, 56}});
    b.add("shl_basic", {{0, 3}}, {B::op(Op::SHL, M(0))}, {{0, 6}});
    b.add("shl_into_sign", {{0, 64}}, {B::op(Op::SHL, M(0))}, {{0, -128}});
    b.add("shr_positive", {{0, 6}}, {B::op(Op::SHR, M(0))}, {{0, 3}});
    b.add("shr_negative", {{0, -8}}, {B::op(Op::SHR, M(0))}, {{0, -4}});
    b.add("and_bits", {{0, 12}, {1, 10}}, {B::op(Op::AND, M(0), M(1))}, {{0, 8}});
    b.add("or_bits", {{0, 12}, {1, 10}}, {B::op(Op::OR, M(0), M(1))}, {{0, 14}});
    b.add("xor_bits", {{0, 12}, {1, 10}}, {B::op(Op::XOR, M(0), M(1))}, {{0, 6}});
    b.add("xor_self_clears", {{0, -77}}, {B::op(Op::XOR, M(0), M(0))}, {{0, 0}});
    probe("jmp_always", {}, B::op(Op::JMP, 0, I(2)), {{kFlag, 0}});
    probe("jz_taken", {{0, 0}}, B::op(Op::JZ, M(0), I(2)), {{kFlag, 0}});
    probe("jz_not_taken", {{0, 5}}, B::op(Op::JZ, M(0), I(2)), {{kFlag, 1}});
    probe("jnz_taken", {{0, -3}}, B::op(Op::JNZ, M(0), I(2)), {{kFlag, 0}});
    probe("jnz_not_taken", {{0, 0}}, B::op(Op::JNZ, M(0), I(2)), {{kFlag, 1}});
    probe("cmp_negative_taken", {{0, -1}}, B::op(Op::CMP, M(0), I(2)), {{kFlag, 0}});
    probe("cmp_zero_not_taken", {{0, 0}}, B::op(Op::CMP, M(0), I(2)), {{kFlag, 1}});
    b.add("load_first_slot", {{0, 55}, {1, 0}}, {B::op(Op::LOAD, M(2), M(1))}, {{2, 55}});
    b.add("load_last_slot", {{last, -42}, {1, last_ptr}}, {B::op(Op::LOAD, M(2), M(1))}, {{2, -42}});
    b.add("find_unique_key", {{5, 77}, {3, 12}}, {B::op(Op::FIND, M(2), M(5))}, {{2, 5}});
    b.add("swap_pair", {{0, 1}, {1, 2}}, {B::op(Op::SWAP, M(0), M(1))}, {{0, 2}, {1, 1}});
    b.add("cmov_moves_when_negative", {{0, -5}, {1, 9}}, {B::op(Op::CMOV, M(0), M(1))}, {{0, 9}});
    b.add("cmov_keeps_when_nonnegative", {{0, 0}, {1, 9}}, {B::op(Op::CMOV, M(0), M(1))}, {{0, 0}});
    b.add("mulacc_msb_clear", {{0, 3}, {1, 5}}, {B::op(Op::MULACC, M(0), M(1))}, {{0, 6}});
    b.add("mulacc_msb_set", {{0, -127}, {1, 5}}, {B::op(Op::MULACC, M(0), M(1))}, {{0, 7}});
    {
        std::vector<B::Ins> chain(static_cast<std::size_t>(cfg.nbits), B::op(Op::MULACC, M(0), M(1)));
        b.add("mulacc_product", {{0, 3}, {1, 5}}, {}, {{0, 15}});
        for (auto i : chain) b.cases.back().program.code.push_back({i.a, i.b, i.c});
    }
    b.add("store_first_slot", {{1, 0}, {2, 66}}, {B::op(Op::STORE, M(2), M(1))}, {{0, 66}, {1, 0}});
    b.add("store_last_slot", {{1, last_ptr}, {2, -9}}, {B::op(Op::STORE, M(2), M(1))}, {{last, -9}});
    return b.cases;
}

std::vector<SuiteCase> crosshead_cases(const MachineConfig& cfg) {
    Builder b(cfg, "crosshead");
    auto M = [&](int x) { return b.M(x); };
    auto I = [&](int k) { return b.I(k); };
    using B = Builder;
    const int last = b.last();
    auto swap = [&](int x, int y) { return B::op(Op::SWAP, M(x), M(y)); };

    b.add("swap_adjacent", {{3, 30}, {4, -40}}, {swap(3, 4)}, {{3, -40}, {4, 30}});
    b.add("swap_non_adjacent", {{1, 11}, {40, -3}}, {swap(1, 40)}, {{1, -3}, {40, 11}});
    b.add("swap_self", {{5, 17}}, {swap(5, 5)}, {{5, 17}});
    b.add("swap_twice_identity", {{0, 6}, {1, -6}}, {swap(0, 1), swap(0, 1)}, {{0, 6}, {1, -6}});
    b.add("swap_first_and_last", {{0, 1}, {last, 2}}, {swap(0, last)}, {{0, 2}, {last, 1}});
    b.add("swap_extremes", {{2, -128}, {3, 127}}, {swap(2, 3)}, {{2, 127}, {3, -128}});
    b.add("swap_equal_values", {{2, 9}, {3, 9}}, {swap(2, 3)}, {{2, 9}, {3, 9}});
    b.add("swap_zero_with_value", {{2, 0}, {3, -1}}, {swap(2, 3)}, {{2, -1}, {3, 0}});
    b.add("swap_then_read", {{0, 4}, {1, 5}}, {swap(0, 1), B::op(Op::MOV, M(2), M(0))}, {{0, 5}, {1, 4}, {2, 5}});
    b.add("swap_rotate_three", {{0, 1}, {1, 2}, {2, 3}}, {swap(0, 1), swap(1, 2)}, {{0, 2}, {1, 3}, {2, 1}});
    b.add("swap_operands_reversed", {{6, 60}, {2, 20}}, {swap(6, 2)}, {{6, 20}, {2, 60}});
    b.add("swap_overlapping_pairs", {{0, 1}, {1, 2}, {2, 3}}, {swap(0, 1), swap(0, 2)}, {{0, 3}, {1, 1}, {2, 2}});
    b.add("swap_then_add", {{0, 10}, {1, 3}}, {swap(0, 1), B::op(Op::ADD, M(0), M(1))}, {{0, 13}, {1, 10}});
    b.add("swap_alternating_bits", {{0, 85}, {1, -86}}, {swap(0, 1)}, {{0, -86}, {1, 85}});
    b.add("store_then_load", {{1, 7}, {2, -33}},
          {B::op(Op::STORE, M(2), M(1)), B::op(Op::LOAD, M(3), M(1))}, {{7, -33}, {3, -33}});
    b.add("store_next_to_pointer", {{3, 4}, {2, 71}, {4, 0}}, {B::op(Op::STORE, M(2), M(3))}, {{3, 4}, {4, 71}});
    b.add("store_over_own_pointer", {{3, 3}, {2, 50}}, {B::op(Op::STORE, M(2), M(3))}, {{3, 50}, {2, 50}});
    b.add("load_after_swap", {{0, 5}, {1, 44}, {5, 99}, {44, -1}},
          {swap(0, 1), B::op(Op::LOAD, M(2), M(1))}, {{0, 44}, {1, 5}, {2, 99}});
    // Three swaps under a DEC/JNZ loop leave the pair exchanged.
    b.add("swap_in_loop", {{0, 1}, {1, 2}, {2, 3}},
          {swap(0, 1), B::op(Op::DEC, M(2)), B::op(Op::JNZ, M(2), I(0))}, {{0, 2}, {1, 1}, {2, 0}});
    return b.cases;
}

std::string default_suite_dir() { return std::string(LOOM_PROGRAMS_DIR) + "/suite"; }

std::vector<SuiteCase> compiled_cases(const MachineConfig& cfg, const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".c") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    const std::regex item(R"(([A-Za-z_][A-Za-z0-9_.]*)(?:\[(\d+)\])?=(-?\d+))");
    std::vector<SuiteCase> out;
    for (const auto& path : files) {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string src = ss.str();
        SuiteCase c;
        c.category = "compiled";
        c.name = path.stem().string();
        c.source_path = path.string();
        c.max_steps = 4096;
        CompileResult r;
        try {
            r = compile(src, cfg);
        } catch (const CompileError& e) {
            throw Error(format_diagnostic(path.string(), e));
        }
        c.program = r.program;
        std::istringstream lines(src);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.rfind("// steps:", 0) == 0) c.max_steps = std::stoull(line.substr(9));
            if (line.rfind("// expect:", 0) != 0) continue;
            const std::string body = line.substr(10);
            for (std::sregex_iterator it(body.begin(), body.end(), item), end; it != end; ++it) {
                const std::string name = (*it)[1];
                const int idx = (*it)[2].matched ? std::stoi((*it)[2]) : 0;
                c.expect.push_back({r.slot(name, idx), std::stoll((*it)[3]), (*it)[0]});
            }
        }
        if (c.expect.empty()) throw Error(path.string() + ": no expectations");
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<SuiteCase> standard_suite(const MachineConfig& cfg, const std::string& compiled_dir) {
    auto all = opcode_cases(cfg);
    for (auto& c : crosshead_cases(cfg)) all.push_back(std::move(c));
    for (auto& c : compiled_cases(cfg, compiled_dir)) all.push_back(std::move(c));
    return all;
}

CaseCheck check_case(const MachineConfig& cfg, const SuiteCase& c) {
    CaseCheck out;
    const auto res = run_program(cfg, c.program, c.max_steps);
    out.steps = res.steps;
    std::ostringstream os;
    if (res.status == RunStatus::Fault) {
        os << "fault: " << res.fault->what();
    } else if (res.status == RunStatus::StepLimit) {
        os << "no halt within " << c.max_steps << " steps";
    } else {
        for (const auto& e : c.expect) {
            const auto got = res.final_state.memory[static_cast<std::size_t>(e.slot)];
            if (got != e.value) os << e.label << " got " << got << " want " << e.value << "; ";
        }
    }
    out.detail = os.str();
    out.ok = out.detail.empty();
    return out;
}

}  // namespace loom
