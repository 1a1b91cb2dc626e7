// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <unistd.h>

#include "loom/sparse.hpp"

using namespace loom;
namespace fs = std::filesystem;

namespace {

struct Output {
    int status = -1;
    std::string text;
};

Output sh(const std::string& args) {
    const std::string cmd = std::string(LOOM_CLI_PATH) + " " + args + " 2>&1";
    Output out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return out;
    std::array<char, 4096> buf{};
    while (const std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.text.append(buf.data(), n);
    const int w = pclose(p);
    out.status = WIFEXITED(w) ? WEXITSTATUS(w) : -1;
    return out;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("loom-cli-" + std::to_string(::getpid()) + "-" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string file(const std::string& name, const std::string& text) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

std::string programs(const std::string& name) { return std::string(LOOM_PROGRAMS_DIR) + "/" + name; }

int reported(const std::string& text, const std::string& key) {
    std::smatch m;
    const std::regex re(key + ": (-?\\d+)");
    return std::regex_search(text, m, re) ? std::stoi(m[1]) : -1;
}

// Memory dump lines only.
std::string dump(const std::string& text) {
    std::string out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("mem[", 0) == 0) out += line + "\n";
    }
    return out;
}

const char* kIncProgram =
    "loom-prog v1 n=1024 s=32 m=64 N=8\n"
    "mem 0 5\n"
    "ins 0 3 32 0\n"
    "ins 1 0 0 0\n";

}  // namespace

TEST_F(Cli, CompileReportsSudokuSizes) {
    const Output a = sh("compile " + programs("sudoku.c") + " --profile 512 -o " + path("s.loomprog"));
    ASSERT_EQ(a.status, 0) << a.text;
    EXPECT_NEAR(reported(a.text, "instructions"), 284, 284 * 0.15);
    EXPECT_TRUE(fs::exists(path("s.loomprog")));
    const Output b = sh("compile " + programs("sudoku.c") + " --profile 2048 --no-store -o " + path("s2.loomprog"));
    ASSERT_EQ(b.status, 0) << b.text;
    EXPECT_NEAR(reported(b.text, "instructions"), 1085, 1085 * 0.15);
}

TEST_F(Cli, CompileErrorExitsWithDiagnostic) {
    const std::string src = file("bad.c", "int main() {\n  int x = ;\n}\n");
    const Output o = sh("compile " + src);
    EXPECT_EQ(o.status, 1);
    EXPECT_TRUE(std::regex_search(o.text, std::regex(R"(bad\.c:2:11: error: )"))) << o.text;
}

TEST_F(Cli, RunIncOnEveryEngine) {
    const std::string prog = file("inc.loomprog", kIncProgram);
    std::string first;
    for (const char* e : {"interp", "dense", "sparse"}) {
        const Output o = sh("run " + prog + " --engine " + e);
        ASSERT_EQ(o.status, 0) << o.text;
        EXPECT_NE(o.text.find("mem[0] = 6"), std::string::npos) << o.text;
        EXPECT_NE(o.text.find("status: halted"), std::string::npos);
        if (first.empty()) first = dump(o.text);
        EXPECT_EQ(dump(o.text), first) << e;
    }
}

TEST_F(Cli, RunCompiledSourceWithSymbols) {
    const Output o = sh("run " + programs("suite/01_fibonacci.c") + " --profile 512");
    ASSERT_EQ(o.status, 0) << o.text;
    EXPECT_TRUE(std::regex_search(o.text, std::regex(R"(mem\[\d+\] = 55  r\n)"))) << o.text;
}

TEST_F(Cli, RunawayLoopTimesOut) {
    const std::string src = file("loop.c", "int x; int main() { while (1) x++; }\n");
    const Output o = sh("run " + src + " --max-steps 100");
    EXPECT_EQ(o.status, 2) << o.text;
    EXPECT_NE(o.text.find("status: timeout"), std::string::npos);
    EXPECT_EQ(reported(o.text, "steps"), 100);
}

TEST_F(Cli, RunTraceAndInputScript) {
    const std::string src = file("acc.c", "int k; int total; int main() { total += k; }\n");
    const std::string in = file("keys.txt", "tick 0 slot 0 value 4\ntick 2 slot 0 value -1\n");
    const Output o = sh("run " + src + " --profile 512 --input " + in + " --trace");
    ASSERT_EQ(o.status, 0) << o.text;
    // Ticks 0 and 1 add 4, tick 2 adds -1.
    EXPECT_NE(o.text.find("= 7  total"), std::string::npos) << o.text;
    EXPECT_NE(o.text.find("tick 2:"), std::string::npos);
    EXPECT_NE(o.text.find("step=0 pc="), std::string::npos);
}

TEST_F(Cli, WeightsRoundTrip) {
    const Output o = sh("weights --profile 512 -o " + path("w.loomw"));
    ASSERT_EQ(o.status, 0) << o.text;
    const SparseModel m = load_weights(path("w.loomw"));
    EXPECT_EQ(m.cfg, profile_512());
    EXPECT_EQ(static_cast<int>(m.nonzero_count()), reported(o.text, "nonzeros"));
}

TEST_F(Cli, VerifyPassesAndCatchesCorruptWeights) {
    const std::string prog = file("inc.loomprog", kIncProgram);
    ASSERT_EQ(sh("weights --profile 1024 -o " + path("good.loomw")).status, 0);
    const Output good = sh("verify " + prog + " --weights " + path("good.loomw"));
    EXPECT_EQ(good.status, 0) << good.text;
    EXPECT_NE(good.text.find("2/2 checks passed"), std::string::npos) << good.text;

    SparseModel m = load_weights(path("good.loomw"));
    for (auto& t : m.layers.back().W2.entries) t.value = -t.value;
    save_weights(path("bad.loomw"), m);
    const Output bad = sh("verify " + prog + " --weights " + path("bad.loomw"));
    EXPECT_NE(bad.status, 0);
    EXPECT_NE(bad.text.find("divergence at step 1"), std::string::npos) << bad.text;
}

TEST_F(Cli, VerifySnakeTicks) {
    const std::string keys = file("keys.txt", "tick 0 slot 0 value 0\ntick 1 slot 0 value 3\ntick 2 slot 0 value 2\n");
    const Output o = sh("verify " + programs("snake.c") + " --profile 1024 --engines sparse --input " + keys);
    EXPECT_EQ(o.status, 0) << o.text;
    EXPECT_NE(o.text.find("PASS"), std::string::npos);
    EXPECT_NE(o.text.find("0 divergences"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_NE(sh("").status, 0);
    EXPECT_NE(sh("run " + programs("snake.c") + " --engine quantum").status, 0);
    EXPECT_NE(sh("compile /nonexistent.c").status, 0);
}
