// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "loom/c_eval.hpp"
#include "loom/compiler.hpp"
#include "loom/isa.hpp"

using namespace loom;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string program_path(const std::string& name) { return std::string(LOOM_PROGRAMS_DIR) + "/" + name; }

std::vector<std::string> suite_files() {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(program_path("suite"))) {
        if (e.path().extension() == ".c") out.push_back(e.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

RunResult run(const MachineConfig& cfg, const CompileResult& r, std::uint64_t max_steps = 1'000'000) {
    return run_program(cfg, r.program, max_steps);
}

std::int64_t mem(const RunResult& rr, const CompileResult& r, const std::string& name, int idx = 0) {
    return rr.final_state.memory.at(static_cast<std::size_t>(r.slot(name, idx)));
}

CompileError::Kind error_kind(const std::string& src, const MachineConfig& cfg = profile_512()) {
    try {
        compile(src, cfg);
    } catch (const CompileError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for: " << src;
    return CompileError::Kind::Lex;
}

// Checks every global of the unit against a fresh evaluator run.
void expect_matches_evaluator(const std::string& src, const MachineConfig& cfg, const CompileOptions& opt = {}) {
    const Unit unit = parse_source(src);
    const CompileResult r = codegen(unit, cfg, opt);
    const RunResult rr = run(cfg, r, 50'000'000);
    ASSERT_EQ(rr.status, RunStatus::Halted) << src;
    Evaluator ev(unit, cfg.nbits);
    ev.run(100'000'000);
    for (const auto& g : unit.globals) {
        for (int k = 0; k < std::max(g->size, 1); ++k) {
            EXPECT_EQ(mem(rr, r, g->name, k), ev.global(g->name, k)) << g->name << "[" << k << "]\n" << src;
        }
    }
}

}  // namespace

TEST(Lexer, AssignmentTokens) {
    const auto t = lex("x = 5;");
    ASSERT_EQ(t.size(), 5u);
    EXPECT_EQ(t[0].kind, Tok::Ident);
    EXPECT_EQ(t[0].text, "x");
    EXPECT_EQ(t[1].kind, Tok::Punct);
    EXPECT_EQ(t[1].text, "=");
    EXPECT_EQ(t[2].kind, Tok::Int);
    EXPECT_EQ(t[2].value, 5);
    EXPECT_EQ(t[3].text, ";");
    EXPECT_EQ(t[4].kind, Tok::End);
}

TEST(Lexer, WhileHeader) {
    const auto t = lex("while (i < n)");
    ASSERT_EQ(t.size(), 7u);
    EXPECT_EQ(t[0].kind, Tok::Keyword);
    EXPECT_EQ(t[0].text, "while");
    EXPECT_EQ(t[1].text, "(");
    EXPECT_EQ(t[2].kind, Tok::Ident);
    EXPECT_EQ(t[3].text, "<");
    EXPECT_EQ(t[4].kind, Tok::Ident);
    EXPECT_EQ(t[5].text, ")");
}

TEST(Lexer, CommentsAndLocations) {
    const auto t = lex("// one\n/* two\n */ int  x0 = 0x1F;");
    ASSERT_GE(t.size(), 5u);
    EXPECT_EQ(t[0].text, "int");
    EXPECT_EQ(t[0].loc.line, 3);
    EXPECT_EQ(t[0].loc.col, 5);
    EXPECT_EQ(t[1].text, "x0");
    EXPECT_EQ(t[3].value, 31);
}

TEST(Lexer, Errors) {
    EXPECT_EQ(error_kind("int main() { int x = 0x; }"), CompileError::Kind::Lex);
    EXPECT_EQ(error_kind("int main() { int x = 3 $ 4; }"), CompileError::Kind::Lex);
    EXPECT_THROW(lex("0x"), CompileError);
    try {
        lex("int a;\n  @");
        FAIL();
    } catch (const CompileError& e) {
        EXPECT_EQ(e.loc().line, 2);
        EXPECT_EQ(e.loc().col, 3);
    }
}

TEST(Parser, IfElse) {
    const Unit u = parse_source("int a; int b; int c; int main() { if (a < b) { c = a; } else { c = b; } }");
    const Function* f = u.find("main");
    ASSERT_NE(f, nullptr);
    ASSERT_EQ(f->body->body.size(), 1u);
    const Stmt& s = *f->body->body[0];
    EXPECT_EQ(s.kind, Stmt::Kind::If);
    EXPECT_EQ(s.body.size(), 2u);
    EXPECT_EQ(s.expr->op, "<");
}

TEST(Parser, ArrayDecl) {
    const Unit u = parse_source("int a[81]; int main() {}");
    ASSERT_EQ(u.globals.size(), 1u);
    EXPECT_EQ(u.globals[0]->size, 81);
}

TEST(Parser, ForNeedsAllClauses) {
    EXPECT_EQ(error_kind("int main() { for (;;) {} }"), CompileError::Kind::Parse);
    EXPECT_EQ(error_kind("int main() { int i; for (i = 0;; i++) {} }"), CompileError::Kind::Parse);
}

TEST(Parser, Precedence) {
    const Unit u = parse_source("int a; int b; int c; int r; int main() { r = a + b * c; r = a & b == c; r = a << 1 + b; "
                                "r = -a + b; r = a || b && c; r = a < b == b < c; }");
    const auto& body = u.find("main")->body->body;
    auto top = [&](int k) -> const Expr& { return *body[static_cast<std::size_t>(k)]->expr; };
    EXPECT_EQ(top(0).op, "+");
    EXPECT_EQ(top(0).args[1]->op, "*");
    EXPECT_EQ(top(1).op, "&");
    EXPECT_EQ(top(1).args[1]->op, "==");
    EXPECT_EQ(top(2).op, "<<");
    EXPECT_EQ(top(2).args[1]->op, "+");
    EXPECT_EQ(top(3).op, "+");
    EXPECT_EQ(top(3).args[0]->kind, Expr::Kind::Unary);
    EXPECT_EQ(top(4).op, "||");
    EXPECT_EQ(top(4).args[1]->op, "&&");
    EXPECT_EQ(top(5).op, "==");
}

TEST(Parser, SyntaxErrorLocation) {
    try {
        parse_source("int main() {\n  x = ;\n}");
        FAIL();
    } catch (const CompileError& e) {
        EXPECT_EQ(e.kind(), CompileError::Kind::Parse);
        EXPECT_EQ(e.loc().line, 2);
        EXPECT_EQ(e.loc().col, 7);
    }
}

TEST(Diagnostics, Format) {
    try {
        compile("int main() {\n    y = 1;\n}", profile_512());
        FAIL();
    } catch (const CompileError& e) {
        EXPECT_EQ(e.kind(), CompileError::Kind::Semantic);
        const std::string d = format_diagnostic("bad.c", e);
        EXPECT_TRUE(std::regex_match(d, std::regex(R"(bad\.c:2:5: error: .*'y'.*)"))) << d;
    }
}

TEST(Semantics, Errors) {
    EXPECT_EQ(error_kind("int main() { int a[4]; a = 1; }"), CompileError::Kind::Semantic);
    EXPECT_EQ(error_kind("int f() { return f(); } int main() { f(); }"), CompileError::Kind::Semantic);
    EXPECT_EQ(error_kind("int x; int main() { x = x / 2; }"), CompileError::Kind::Lex);
    EXPECT_EQ(error_kind("int x; int n; int main() { x = x << n; }"), CompileError::Kind::Semantic);
    EXPECT_EQ(error_kind("int main() { break; }"), CompileError::Kind::Semantic);
    EXPECT_EQ(error_kind("int x; int main() { x = 1; }  int main() {}"), CompileError::Kind::Semantic);
    EXPECT_EQ(error_kind("int x; int main() { x = abs(1, 2); }"), CompileError::Kind::Semantic);
}

TEST(Codegen, ConstantFoldingGivesSingleMove) {
    const auto cfg = profile_512();
    const CompileResult r = compile("int x; int main() { x = 2 + 3; }", cfg);
    ASSERT_EQ(r.instruction_count(), 2);  // MOV then HALT
    const Instruction& ins = r.program.code[0];
    EXPECT_EQ(decode_opcode(ins, cfg.s), Opcode::MOV);
    EXPECT_EQ(ins.b, cfg.s + r.slot("x"));
    EXPECT_EQ(r.program.memory.at(static_cast<std::size_t>(ins.c - cfg.s)), 5);
    EXPECT_EQ(mem(run(cfg, r), r, "x"), 5);
}

TEST(Codegen, MulBuiltinSize) {
    const auto cfg = profile_512();
    const std::string src = "int x = 7; int y = 9; int r; int main() { r = mul(x, y); }";
    const CompileResult r = compile(src, cfg);
    // 22 for the expansion, one MOV into r, then HALT.
    EXPECT_EQ(r.instruction_count(), 24);
    const RunResult rr = run(cfg, r);
    EXPECT_EQ(rr.steps, 24u);
    EXPECT_EQ(mem(rr, r, "r"), 63);
    // A negative product takes the negated value and skips one move.
    Program p = r.program;
    p.memory[static_cast<std::size_t>(r.slot("y"))] = -9;
    const RunResult neg = run_program(cfg, p, 100);
    EXPECT_EQ(neg.steps, 23u);
    EXPECT_EQ(neg.final_state.memory[static_cast<std::size_t>(r.slot("r"))], -63);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Codegen, MulMatchesProductInDomain) {
    const auto cfg = profile_512();
    const CompileResult r = compile("int x; int y; int r; int main() { r = mul(x, y); }", cfg);
    int checked = 0;
    for (int a = -127; a <= 127; ++a) {
        for (int b = -127; b <= 127; ++b) {
            if (std::abs(a) * std::abs(b) >= 128) continue;
            Program p = r.program;
            p.memory[static_cast<std::size_t>(r.slot("x"))] = a;
            p.memory[static_cast<std::size_t>(r.slot("y"))] = b;
            const RunResult rr = run_program(cfg, p, 100);
            ASSERT_EQ(rr.status, RunStatus::Halted);
            ASSERT_EQ(rr.final_state.memory[static_cast<std::size_t>(r.slot("r"))], a * b) << a << "*" << b;
            ++checked;
        }
    }
    EXPECT_GT(checked, 1000);
}

TEST(Codegen, ComparisonsMatchIntegerOrder) {
    const auto cfg = profile_512();
    const CompileResult r = compile(
        "int a; int b; int lt; int le; int gt; int ge; int eq; int ne;"
        "int main() { lt = a < b; le = a <= b; gt = a > b; ge = a >= b; eq = a == b; ne = a != b; }",
        cfg);
    for (int a = -64; a < 64; a += 3) {
        for (int b = -63; b < 64; b += 5) {
            Program p = r.program;
            p.memory[static_cast<std::size_t>(r.slot("a"))] = a;
            p.memory[static_cast<std::size_t>(r.slot("b"))] = b;
            const RunResult rr = run_program(cfg, p, 1000);
            ASSERT_EQ(rr.status, RunStatus::Halted);
            auto at = [&](const char* n) { return rr.final_state.memory[static_cast<std::size_t>(r.slot(n))]; };
            EXPECT_EQ(at("lt"), a < b ? 1 : 0) << a << " " << b;
            EXPECT_EQ(at("le"), a <= b ? 1 : 0) << a << " " << b;
            EXPECT_EQ(at("gt"), a > b ? 1 : 0) << a << " " << b;
            EXPECT_EQ(at("ge"), a >= b ? 1 : 0) << a << " " << b;
            EXPECT_EQ(at("eq"), a == b ? 1 : 0) << a << " " << b;
            EXPECT_EQ(at("ne"), a != b ? 1 : 0) << a << " " << b;
        }
    }
}

TEST(Codegen, ProfilesChangeAddressesNotBehavior) {
    const std::string src = slurp(program_path("suite/25_bubble_sort.c"));
    const CompileResult r512 = compile(src, profile_512());
    const CompileResult r1024 = compile(src, profile_1024());
    EXPECT_NE(r512.program.code, r1024.program.code);
    const RunResult a = run(profile_512(), r512);
    const RunResult b = run(profile_1024(), r1024);
    ASSERT_EQ(a.status, RunStatus::Halted);
    ASSERT_EQ(b.status, RunStatus::Halted);
    EXPECT_EQ(a.steps, b.steps);
    for (int k = 0; k < 6; ++k) EXPECT_EQ(mem(a, r512, "a", k), mem(b, r1024, "a", k));
}

TEST(Codegen, Deterministic) {
    const std::string src = slurp(program_path("snake.c"));
    const auto cfg = profile_1024();
    std::ostringstream a;
    std::ostringstream b;
    write_compiled(a, compile(src, cfg));
    write_compiled(b, compile(src, cfg));
    EXPECT_EQ(a.str(), b.str());
}

TEST(Codegen, CapacityErrors) {
    const auto cfg = profile_512();
    try {
        compile("int a[200]; int main() {}", cfg);
        FAIL();
    } catch (const CompileError& e) {
        EXPECT_EQ(e.kind(), CompileError::Kind::Capacity);
        EXPECT_NE(std::string(e.what()).find("data budget"), std::string::npos);
    }
    std::string src = "int x; int y; int z; int main() {";
    for (int k = 0; k < 200; ++k) src += " x = y + z;";
    src += " }";
    try {
        compile(src, cfg);
        FAIL();
    } catch (const CompileError& e) {
        EXPECT_EQ(e.kind(), CompileError::Kind::Capacity);
        EXPECT_NE(std::string(e.what()).find("instruction budget"), std::string::npos);
    }
}

TEST(Codegen, ProgramsPassValidation) {
    for (const auto& path : suite_files()) {
        const CompileResult r = compile(slurp(path), profile_512());
        EXPECT_TRUE(validate_program(profile_512(), r.program).empty()) << path;
        EXPECT_LE(r.data_slots(), profile_512().m);
        EXPECT_LE(r.instruction_count(), profile_512().instr_slots());
    }
}

TEST(Codegen, VariableWritesUseStore) {
    const auto cfg = profile_512();
    const CompileResult r = compile("int a[8]; int i = 3; int v = 9; int main() { a[i] = v; }", cfg);
    int stores = 0;
    for (const auto& ins : r.program.code) stores += decode_opcode(ins, cfg.s) == Opcode::STORE;
    EXPECT_EQ(stores, 1);
    EXPECT_LE(r.instruction_count(), 4);
    EXPECT_EQ(mem(run(cfg, r), r, "a", 3), 9);
}

TEST(NoStore, IdenticalWithoutVariableWrites) {
    const auto cfg = profile_2048();
    for (const char* name : {"suite/01_fibonacci.c", "suite/03_array_minimum.c", "suite/29_collatz.c"}) {
        const Unit u = parse_source(slurp(program_path(name)));
        const CompileResult a = codegen(u, cfg);
        const CompileResult b = codegen_no_store(u, cfg);
        EXPECT_EQ(a.program.code, b.program.code) << name;
        EXPECT_EQ(a.program.memory, b.program.memory) << name;
    }
}

TEST(NoStore, DispatchRegionForLargeArray) {
    const auto cfg = profile_2048();
    const Unit u = parse_source("int a[81]; int i; int v; int main() { a[i] = v; }");
    const int with = codegen(u, cfg).instruction_count();
    const int without = codegen_no_store(u, cfg).instruction_count();
    const int region = without - with;
    EXPECT_GE(region, 340);
    EXPECT_LE(region, 460);
}

TEST(NoStore, BehaviorMatchesStoreMode) {
    const auto cfg = profile_2048();
    for (const auto& path : suite_files()) {
        const Unit u = parse_source(slurp(path));
        const CompileResult a = codegen(u, cfg);
        const CompileResult b = codegen_no_store(u, cfg);
        const RunResult ra = run(cfg, a);
        const RunResult rb = run(cfg, b);
        ASSERT_EQ(ra.status, RunStatus::Halted) << path;
        ASSERT_EQ(rb.status, RunStatus::Halted) << path;
        for (const auto& g : u.globals) {
            for (int k = 0; k < std::max(g->size, 1); ++k) {
                EXPECT_EQ(mem(ra, a, g->name, k), mem(rb, b, g->name, k)) << path << " " << g->name;
            }
        }
    }
}

TEST(Programs, SuiteMatchesEvaluator) {
    for (const auto& path : suite_files()) {
        SCOPED_TRACE(path);
        expect_matches_evaluator(slurp(path), profile_512());
    }
}

TEST(Programs, BubbleSortSorts) {
    const auto cfg = profile_512();
    const std::string src = slurp(program_path("bubble_sort.c"));
    const CompileResult r = compile(src, cfg);
    const RunResult rr = run(cfg, r);
    ASSERT_EQ(rr.status, RunStatus::Halted);
    std::vector<std::int64_t> want = {42, -7, 19, 0, 61, -63, 5, 19};
    std::sort(want.begin(), want.end());
    for (int k = 0; k < 8; ++k) EXPECT_EQ(mem(rr, r, "a", k), want[static_cast<std::size_t>(k)]);
}

TEST(Programs, SudokuSizesAndSolution) {
    const std::string src = slurp(program_path("sudoku.c"));
    const Unit u = parse_source(src);
    const CompileResult r = codegen(u, profile_512());
    EXPECT_NEAR(r.instruction_count(), 284, 284 * 0.15);
    const CompileResult big = codegen_no_store(u, profile_2048());
    EXPECT_NEAR(big.instruction_count(), 1085, 1085 * 0.15);

    const RunResult rr = run(profile_512(), r, 50'000'000);
    ASSERT_EQ(rr.status, RunStatus::Halted);
    ASSERT_EQ(mem(rr, r, "solved"), 1);
    int grid[9][9];
    for (int k = 0; k < 81; ++k) {
        const auto given = r.program.memory[static_cast<std::size_t>(r.slot("g", k))];
        const auto v = std::abs(mem(rr, r, "g", k));
        if (given != 0) EXPECT_EQ(v, -given);
        grid[k / 9][k % 9] = static_cast<int>(v);
    }
    for (int i = 0; i < 9; ++i) {
        std::vector<bool> row(10), col(10), box(10);
        for (int j = 0; j < 9; ++j) {
            const int a = grid[i][j];
            const int b = grid[j][i];
            const int c = grid[(i / 3) * 3 + j / 3][(i % 3) * 3 + j % 3];
            ASSERT_TRUE(a >= 1 && a <= 9 && b >= 1 && b <= 9 && c >= 1 && c <= 9);
            EXPECT_FALSE(row[a]);
            EXPECT_FALSE(col[b]);
            EXPECT_FALSE(box[c]);
            row[a] = col[b] = box[c] = true;
        }
    }
}

TEST(Programs, SnakeSize) {
    const CompileResult r = compile(slurp(program_path("snake.c")), profile_1024());
    EXPECT_NEAR(r.instruction_count(), 210, 210 * 0.15);
}

namespace {

// Random expression over globals x, y, z. Shifts use constant amounts.
std::string random_expr(std::mt19937& rng, int depth) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    if (depth == 0 || pick(4) == 0) {
        static const char* leaves[] = {"x", "y", "z", "x", "y", "z", "3", "-5", "100", "0", "1"};
        return leaves[pick(11)];
    }
    const std::string a = random_expr(rng, depth - 1);
    const std::string b = random_expr(rng, depth - 1);
    switch (pick(7)) {
        case 0: {
            static const char* un[] = {"-", "~", "!"};
            return std::string(un[pick(3)]) + "(" + a + ")";
        }
        case 1: return "(" + a + (pick(2) ? " << " : " >> ") + std::to_string(pick(8)) + ")";
        case 2: {
            static const char* fn[] = {"abs", "min", "max", "mul"};
            const int f = pick(4);
            return f == 0 ? "abs(" + a + ")" : std::string(fn[f]) + "(" + a + ", " + b + ")";
        }
        default: {
            static const char* ops[] = {"+", "-", "&", "|", "^", "<", "<=", ">", ">=", "==", "!=", "&&", "||", "*"};
            return "(" + a + " " + ops[pick(14)] + " " + b + ")";
        }
    }
}

}  // namespace

TEST(Programs, RandomExpressionsMatchEvaluator) {
    std::mt19937 rng(1234);
    const auto cfg = profile_1024();
    for (int t = 0; t < 300; ++t) {
        const int x = static_cast<int>(rng() % 256) - 128;
        const int y = static_cast<int>(rng() % 256) - 128;
        const int z = static_cast<int>(rng() % 256) - 128;
        const std::string e = random_expr(rng, 3);
        std::ostringstream src;
        src << "int x = " << x << "; int y = " << y << "; int z = " << z << "; int r; int q;\n"
            << "int main() { r = " << e << "; if (" << e << ") q = 1; else q = 2; x += " << e << "; }";
        SCOPED_TRACE(src.str());
        expect_matches_evaluator(src.str(), cfg);
    }
}
