// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "loom/config.hpp"

namespace loom {

// Operands are absolute column addresses.
struct Instruction {
    int a = 0;
    int b = 0;
    int c = 0;
    friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Program {
    int n = 0;
    int s = 0;
    int m = 0;
    int nbits = 0;
    std::vector<std::int64_t> memory;  // size m, signed values
    std::vector<Instruction> code;     // instruction k lives at column s+m+k

    static Program empty_for(const MachineConfig& cfg);
    bool matches(const MachineConfig& cfg) const;
    void require_matches(const MachineConfig& cfg) const;
    int entry() const { return s + m; }
};

// Text form:
//   loom-prog v1 n=<n> s=<s> m=<m> N=<N>
//   mem <x> <v>
//   ins <k> <a> <b> <c>
// '#' starts a comment.
Program read_program(std::istream& in);
Program load_program(const std::string& path);
void write_program(std::ostream& out, const Program& p);
void save_program(const std::string& path, const Program& p);

}  // namespace loom
