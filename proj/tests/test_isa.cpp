// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdint>

#include "loom/isa.hpp"

using namespace loom;

namespace {

// Reference word semantics written directly against int8_t/uint8_t.
int ref(Opcode op, int b, int c) {
    const auto B = static_cast<std::int8_t>(b);
    const auto C = static_cast<std::int8_t>(c);
    const auto uB = static_cast<std::uint8_t>(B);
    const auto uC = static_cast<std::uint8_t>(C);
    switch (op) {
        case Opcode::MOV: return C;
        case Opcode::ADD: return static_cast<std::int8_t>(uB + uC);
        case Opcode::INC: return static_cast<std::int8_t>(uB + 1);
        case Opcode::DEC: return static_cast<std::int8_t>(uB - 1);
        case Opcode::SUB: return static_cast<std::int8_t>(uB - uC);
        case Opcode::SHL: return static_cast<std::int8_t>(uB << 1);
        case Opcode::SHR: return static_cast<std::int8_t>((uB >> 1) | (uB & 0x80));
        case Opcode::AND: return static_cast<std::int8_t>(uB & uC);
        case Opcode::OR: return static_cast<std::int8_t>(uB | uC);
        case Opcode::XOR: return static_cast<std::int8_t>(uB ^ uC);
        case Opcode::CMOV: return B < 0 ? C : B;
        case Opcode::MULACC: return static_cast<std::int8_t>((uB << 1) + ((uB & 0x80) ? uC : 0));
        default: return 0;
    }
}

struct Fixture {
    MachineConfig cfg = profile_1024();
    Program p = Program::empty_for(cfg);
    int col(int slot) const { return cfg.s + slot; }
    int at(int k) const { return cfg.s + cfg.m + k; }
};

}  // namespace

TEST(Alu, MatchesByteReferenceExhaustively) {
    for (Opcode op : {Opcode::MOV, Opcode::ADD, Opcode::INC, Opcode::DEC, Opcode::SUB, Opcode::SHL, Opcode::SHR,
                      Opcode::AND, Opcode::OR, Opcode::XOR, Opcode::CMOV, Opcode::MULACC}) {
        for (int b = -128; b < 128; ++b) {
            for (int c = -128; c < 128; ++c) {
                ASSERT_EQ(alu(op, b, c, 8), ref(op, b, c)) << opcode_name(op) << " " << b << " " << c;
            }
        }
    }
}

TEST(Alu, RepeatedMulaccMultiplies) {
    // Single-register shift-and-add is exact while the product fits in 8 bits.
    for (int x = 0; x < 256; ++x) {
        for (int y = 0; y < 256 && x * y < 256; ++y) {
            std::int64_t acc = static_cast<std::int8_t>(x);
            for (int i = 0; i < 8; ++i) acc = alu(Opcode::MULACC, acc, static_cast<std::int8_t>(y), 8);
            ASSERT_EQ(acc, static_cast<std::int8_t>(x * y)) << x << "*" << y;
        }
    }
    std::int64_t acc = 3;
    for (int i = 0; i < 8; ++i) acc = alu(Opcode::MULACC, acc, 5, 8);
    EXPECT_EQ(acc, 15);
}

TEST(Opcodes, NamesRoundTrip) {
    for (Opcode op : all_extended_opcodes()) EXPECT_EQ(opcode_from_name(opcode_name(op)), op);
    EXPECT_EQ(static_cast<int>(Opcode::INC), 3);
    EXPECT_EQ(static_cast<int>(Opcode::STORE), 20);
    EXPECT_EQ(static_cast<int>(Opcode::HALT), 0);
    EXPECT_EQ(decode_opcode({32, 0, 0}, 32), Opcode::SUBLEQ);
}

TEST(Interpreter, SubleqBranchesOnNonPositive) {
    Fixture f;
    f.p.memory[0] = 5;
    f.p.memory[1] = 5;
    f.p.code = {{f.col(0), f.col(1), f.at(3)}, {0, 0, 0}, {0, 0, 0}, {3, f.col(2), 0}, {0, 0, 0}};
    auto r = run_program(f.cfg, f.p, 100, true);
    ASSERT_EQ(r.status, RunStatus::Halted);
    EXPECT_EQ(r.final_state.memory[1], 0);
    EXPECT_EQ(r.final_state.memory[2], 1);
    EXPECT_EQ(r.steps, 3u);
    EXPECT_EQ(format_trace_line(r.trace[0]), "step=0 pc=96 op=SUBLEQ a=32 b=33 c=99 writes=[1:5->0] next=99");
}

TEST(Interpreter, LoadStoreFindSwap) {
    Fixture f;
    f.p.memory[0] = 7;    // pointer
    f.p.memory[7] = -42;  // target
    f.p.memory[1] = 9;    // value to store
    f.p.memory[3] = 123;
    f.p.code = {{15, f.col(2), f.col(0)}, {20, f.col(1), f.col(0)}, {16, f.col(4), f.col(3)},
                {17, f.col(2), f.col(4)}, {0, 0, 0}};
    auto r = run_program(f.cfg, f.p, 100);
    ASSERT_EQ(r.status, RunStatus::Halted);
    const auto& M = r.final_state.memory;
    EXPECT_EQ(M[7], 9);
    EXPECT_EQ(M[2], 3);  // the key itself is the unique match, then SWAP
    EXPECT_EQ(M[4], -42);
}

TEST(Interpreter, Faults) {
    Fixture f;
    f.p.memory[0] = 100;
    f.p.code = {{15, f.col(1), f.col(0)}};
    auto r = run_program(f.cfg, f.p, 10);
    ASSERT_EQ(r.status, RunStatus::Fault);
    EXPECT_EQ(r.fault->kind(), FaultKind::Pointer);

    f.p.code = {{16, f.col(1), f.col(2)}};  // many slots hold 0
    r = run_program(f.cfg, f.p, 10);
    EXPECT_EQ(r.fault->kind(), FaultKind::Find);

    f.p.code = {{11, 0, f.col(5)}};
    r = run_program(f.cfg, f.p, 10);
    EXPECT_EQ(r.fault->kind(), FaultKind::Control);

    f.p.code = {{25, f.col(1), f.col(1)}};
    r = run_program(f.cfg, f.p, 10);
    EXPECT_EQ(r.fault->kind(), FaultKind::Illegal);

    f.p.code = {{1, f.at(0), f.col(1)}};
    r = run_program(f.cfg, f.p, 10);
    EXPECT_EQ(r.fault->kind(), FaultKind::Operand);
}

TEST(Interpreter, StepLimitAndHook) {
    Fixture f;
    f.p.code = {{3, f.col(0), 0}, {11, 0, f.at(0)}};
    int patched = 0;
    auto r = run_program(f.cfg, f.p, 10, false, [&](std::uint64_t step, MachineState& s) {
        if (step == 4) {
            s.memory[0] = 50;
            ++patched;
        }
    });
    EXPECT_EQ(r.status, RunStatus::StepLimit);
    EXPECT_EQ(patched, 1);
    EXPECT_EQ(r.final_state.memory[0], 53);
}

TEST(Interpreter, FallingOffTheEndHalts) {
    Fixture f;
    f.p.code = {{3, f.col(0), 0}};
    auto r = run_program(f.cfg, f.p, 10);
    EXPECT_EQ(r.status, RunStatus::Halted);  // slot 1 is an implicit HALT
    EXPECT_EQ(r.steps, 2u);
}

TEST(Validate, FlagsStructuralProblems) {
    Fixture f;
    f.p.code = {{0, 0, 5}, {1, 3, f.col(0)}, {12, f.col(0), f.col(1)}, {24, 0, 0}, {f.col(0), f.col(1), f.at(0)}};
    auto errs = validate_program(f.cfg, f.p);
    EXPECT_EQ(errs.size(), 4u);
}
