// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace loom {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

struct MachineConfig {
    int n = 1024;      // columns
    int ell = 10;      // address bits
    int nbits = 8;     // word bits (N)
    int s = 32;        // scratch columns
    int m = 64;        // memory slots
    double lambda = 10.0;

    int d() const { return 9 * ell + 8 * nbits + 1; }
    int instr_begin() const { return s + m; }
    int instr_slots() const { return n - s - m; }
    int log2_s() const;

    // Throws ConfigError when the derived constraints do not hold.
    void validate() const;
    std::string name() const;
};

bool operator==(const MachineConfig& a, const MachineConfig& b);

MachineConfig profile_512();
MachineConfig profile_1024();
MachineConfig profile_2048();
// Accepts "512", "1024", "2048" or "146x512" style names.
MachineConfig profile_by_name(const std::string& name);
std::vector<MachineConfig> all_profiles();

// Row offsets into the d-dimensional state vector.
struct RowLayout {
    int cmd_a, cmd_b, cmd_c;
    int mem, scr_sub, scr_min;
    int addr_a, addr_b, addr_c;
    int pc, pos;
    int buf_a, buf_b, buf_c;
    int find_temp, load_temp;
    int tags, ind;
    int d;

    explicit RowLayout(const MachineConfig& cfg);

    struct Region {
        std::string name;
        int offset;
        int width;
    };
    std::vector<Region> regions() const;
};

}  // namespace loom
