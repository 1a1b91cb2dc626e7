// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "loom/compiler.hpp"
#include "loom/session.hpp"
#include "loom/sparse.hpp"
#include "loom/suite.hpp"
#include "loom/verify.hpp"

using namespace loom;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::vector<SuiteCase>& suite512() {
    static const std::vector<SuiteCase> cases = standard_suite(profile_512(), default_suite_dir());
    return cases;
}

SparseEngine& sparse512() {
    static SparseEngine e(SparseModel::from_model(build_model(profile_512())));
    return e;
}

int count(const std::string& category) {
    int n = 0;
    for (const auto& c : suite512()) n += c.category == category;
    return n;
}

// Scripted key presses for Snake: turns, a pause toggle and a restart.
int snake_key(int t) {
    static const int keys[] = {-1, -1, 0, -1, 3, -1, -1, 2, -1, 1, 4, -1, 4, -1, 0, -1, -1, 5, -1, 1};
    return keys[t % 20];
}

// Greedy player: head toward the food, never reversing. Directions are
// 0 up, 1 right, 2 down, 3 left on an 8x8 board of cells y*8+x.
int chase_food(std::int64_t hx, std::int64_t hy, std::int64_t food, int dir) {
    const std::int64_t fx = food & 7, fy = food >> 3;
    int want = dir;
    if (fx > hx) want = 1;
    else if (fx < hx) want = 3;
    else if (fy > hy) want = 2;
    else if (fy < hy) want = 0;
    if ((want ^ dir) == 2) want = (dir + 1) & 3;
    return want;
}

}  // namespace

TEST(Suite, CaseCounts) {
    EXPECT_GE(count("opcode"), 42);
    EXPECT_GE(count("crosshead"), 19);
    EXPECT_EQ(count("compiled"), 50);
    EXPECT_EQ(suite512().size(), 111u);
    std::set<std::string> names;
    for (const auto& c : suite512()) EXPECT_TRUE(names.insert(c.category + "/" + c.name).second) << c.name;
}

TEST(Suite, OpcodeCasesCoverEveryOpcode) {
    const auto cfg = profile_512();
    std::set<int> seen;
    for (const auto& c : suite512()) {
        if (c.category != "opcode") continue;
        for (const auto& ins : c.program.code) seen.insert(static_cast<int>(decode_opcode(ins, cfg.s)));
    }
    for (Opcode op : all_extended_opcodes()) EXPECT_TRUE(seen.count(static_cast<int>(op))) << opcode_name(op);
    EXPECT_TRUE(seen.count(static_cast<int>(Opcode::SUBLEQ)));
}

TEST(Suite, InterpreterMeetsExpectations) {
    for (const auto& c : suite512()) {
        const CaseCheck r = check_case(profile_512(), c);
        EXPECT_TRUE(r.ok) << c.category << "/" << c.name << ": " << r.detail;
    }
}

TEST(Suite, SparseLockstepAllCases) {
    for (const auto& c : suite512()) {
        const LockstepReport r = lockstep(sparse512(), c.program, c.max_steps);
        EXPECT_TRUE(r.ok) << c.name << ": " << r.detail;
        EXPECT_TRUE(r.halted) << c.name;
        EXPECT_LT(r.max_drift, 0.1) << c.name;
    }
}

TEST(Suite, DenseLockstepHandBuiltCases) {
    DenseEngine dense(build_model(profile_512()));
    for (const auto& c : suite512()) {
        if (c.category == "compiled") continue;
        const LockstepReport r = lockstep(dense, c.program, c.max_steps);
        EXPECT_TRUE(r.ok) << c.name << ": " << r.detail;
        EXPECT_TRUE(r.halted) << c.name;
    }
}

TEST(Suite, ExpectationParsing) {
    const auto cases = compiled_cases(profile_512(), default_suite_dir());
    const auto it = std::find_if(cases.begin(), cases.end(), [](const SuiteCase& c) { return c.name == "07_loop_thousand"; });
    ASSERT_NE(it, cases.end());
    EXPECT_EQ(it->max_steps, 4000u);
    ASSERT_EQ(it->expect.size(), 2u);
    EXPECT_EQ(it->expect[0].value, -56);
}

TEST(Snake, TickCost) {
    const auto cfg = profile_1024();
    const CompileResult r = compile(slurp(std::string(LOOM_PROGRAMS_DIR) + "/snake.c"), cfg);
    Session s(cfg, r.program, EngineKind::Interp);
    auto at = [&](const char* name) { return s.memory()[static_cast<std::size_t>(r.slot(name))]; };
    std::uint64_t play_steps = 0, all_steps = 0;
    int play_ticks = 0, deaths = 0;
    const int ticks = 400;
    for (int t = 0; t < ticks; ++t) {
        const bool live = at("alive") != 0 && at("paused") == 0;
        const int key = live ? chase_food(at("hx"), at("hy"), at("food"), static_cast<int>(at("dir"))) : 5;
        const TickReport rep = s.tick({{r.slot("key"), key}}, 10'000);
        ASSERT_TRUE(rep.halted) << "tick " << t;
        ASSERT_FALSE(rep.fault);
        all_steps += rep.steps;
        if (live) {
            play_steps += rep.steps;
            ++play_ticks;
            deaths += at("alive") == 0;
        }
    }
    ASSERT_GT(play_ticks, ticks / 2);
    const double avg = static_cast<double>(play_steps) / play_ticks;
    std::cout << "snake: " << play_ticks << " game ticks, " << deaths << " deaths, " << avg << " steps/tick ("
              << static_cast<double>(all_steps) / ticks << " including restart ticks)\n";
    EXPECT_GE(avg, 84 * 0.75);
    EXPECT_LE(avg, 84 * 1.25);
}

TEST(Snake, SparseTicksMatchInterpreter) {
    const auto cfg = profile_1024();
    const CompileResult r = compile(slurp(std::string(LOOM_PROGRAMS_DIR) + "/snake.c"), cfg);
    auto engine = make_engine(cfg, EngineKind::Sparse);
    Session ref(cfg, r.program, EngineKind::Interp);
    Session eng(cfg, r.program, EngineKind::Sparse, engine);
    for (int t = 0; t < 6; ++t) {
        const std::vector<Patch> in = {{r.slot("key"), snake_key(t)}};
        const TickReport a = ref.tick(in, 10'000);
        const TickReport b = eng.tick(in, 10'000);
        EXPECT_EQ(a.steps, b.steps) << "tick " << t;
        EXPECT_TRUE(b.halted);
        EXPECT_FALSE(b.fault);
        EXPECT_EQ(ref.memory(), eng.memory()) << "tick " << t;
    }
}

TEST(Snake, StepwiseLockstepOverOneTick) {
    const auto cfg = profile_1024();
    const CompileResult r = compile(slurp(std::string(LOOM_PROGRAMS_DIR) + "/snake.c"), cfg);
    SparseEngine engine(SparseModel::from_model(build_model(cfg)));
    State st = init_state(cfg, r.program);
    Interpreter ref(cfg, r.program);
    for (int t = 0; t < 3; ++t) {
        write_memory(st, r.slot("key"), snake_key(t + 2));
        ref.state().memory[static_cast<std::size_t>(r.slot("key"))] = snake_key(t + 2);
        const LockstepReport rep = lockstep_continue(engine, st, ref, 10'000);
        EXPECT_TRUE(rep.ok) << rep.detail;
        EXPECT_TRUE(rep.halted);
        write_pc(st, r.program.entry());
        ref.restart();
    }
}

TEST(Session, PatchesAndReset) {
    const auto cfg = profile_512();
    const CompileResult r = compile("int k; int total; int main() { total += k; }", cfg);
    Session s(cfg, r.program, EngineKind::Interp);
    s.tick({{r.slot("k"), 5}}, 100);
    s.tick({{r.slot("k"), 7}}, 100);
    EXPECT_EQ(s.memory()[static_cast<std::size_t>(r.slot("total"))], 12);
    EXPECT_TRUE(s.halted());
    s.reset();
    EXPECT_EQ(s.memory()[static_cast<std::size_t>(r.slot("total"))], 0);
    EXPECT_EQ(s.pc(), r.program.entry());
    EXPECT_THROW(s.tick({{cfg.m, 1}}, 10), RangeError);
}

TEST(Session, StepBudgetSplitsTicks) {
    const auto cfg = profile_512();
    const CompileResult r = compile("int n; int main() { for (int i = 0; i < 10; i++) n++; }", cfg);
    Session a(cfg, r.program, EngineKind::Interp);
    const TickReport part = a.tick({}, 7);
    EXPECT_FALSE(part.halted);
    EXPECT_EQ(part.steps, 7u);
    const TickReport rest = a.tick({}, 1000);
    EXPECT_TRUE(rest.halted);
    EXPECT_EQ(a.memory()[static_cast<std::size_t>(r.slot("n"))], 10);
}

TEST(Session, InputScript) {
    std::istringstream in("# keys\ntick 0 slot 0 value 3\n\ntick 4 slot 0 value -1  # release\ntick 4 slot 2 value 9\n");
    const auto m = parse_input_script(in);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m.at(0)[0].value, 3);
    EXPECT_EQ(m.at(4).size(), 2u);
    EXPECT_EQ(m.at(4)[1].slot, 2);
    std::istringstream bad("tick 1 slot x value 2\n");
    EXPECT_THROW(parse_input_script(bad), FormatError);
}
