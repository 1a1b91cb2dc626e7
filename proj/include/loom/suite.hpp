// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loom/program.hpp"

namespace loom {

struct Expectation {
    int slot = 0;
    std::int64_t value = 0;
    std::string label;
};

// One verification case: a program, its step budget and the final memory
// values it must produce.
struct SuiteCase {
    std::string category;  // "opcode", "crosshead" or "compiled"
    std::string name;
    Program program;
    std::uint64_t max_steps = 64;
    std::vector<Expectation> expect;
    std::string source_path;  // compiled cases only
};

std::vector<SuiteCase> opcode_cases(const MachineConfig& cfg);
std::vector<SuiteCase> crosshead_cases(const MachineConfig& cfg);

// Compiles every *.c file in dir (sorted by name). Each file declares its
// expected results in comment lines:
//   // expect: total=55 a[3]=-7
//   // steps: 2000
std::vector<SuiteCase> compiled_cases(const MachineConfig& cfg, const std::string& dir);

std::vector<SuiteCase> standard_suite(const MachineConfig& cfg, const std::string& compiled_dir);

// Default location of the compiled-program cases.
std::string default_suite_dir();

struct CaseCheck {
    bool ok = true;
    std::uint64_t steps = 0;
    std::string detail;
};

// Runs the case on the interpreter and checks that it halts within its
// budget with every expectation met.
CaseCheck check_case(const MachineConfig& cfg, const SuiteCase& c);

}  // namespace loom
