// SPDX-License-Identifier: Apache-2.0
#include "loom/config.hpp"

#include <bit>

namespace loom {

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

int MachineConfig::log2_s() const { return std::countr_zero(static_cast<unsigned>(s)); }

void MachineConfig::validate() const {
    if (nbits < 2 || nbits > 16) throw ConfigError("nbits must be in [2, 16]");
    if (!is_pow2(n) || n < 64) throw ConfigError("n must be a power of two >= 64");
    if ((1 << ell) != n) throw ConfigError("n must equal 2^ell");
    if (!is_pow2(s) || s < 32) throw ConfigError("s must be a power of two >= 32 (21 extended opcodes)");
    if (2 * s > n) throw ConfigError("s must be at most n/2");
    if (m < 1 || m > (1 << nbits)) throw ConfigError("m must be in [1, 2^nbits]");
    if (s + m >= n) throw ConfigError("no room for instructions: s + m >= n");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
}

std::string MachineConfig::name() const { return std::to_string(d()) + "x" + std::to_string(n); }

bool operator==(const MachineConfig& a, const MachineConfig& b) {
    return a.n == b.n && a.ell == b.ell && a.nbits == b.nbits && a.s == b.s && a.m == b.m &&
           a.lambda == b.lambda;
}

MachineConfig profile_512() { return MachineConfig{512, 9, 8, 32, 160, 10.0}; }
MachineConfig profile_1024() { return MachineConfig{1024, 10, 8, 32, 64, 10.0}; }
MachineConfig profile_2048() { return MachineConfig{2048, 11, 8, 32, 224, 10.0}; }

std::vector<MachineConfig> all_profiles() { return {profile_512(), profile_1024(), profile_2048()}; }

MachineConfig profile_by_name(const std::string& name) {
    for (const auto& p : all_profiles()) {
        if (name == std::to_string(p.n) || name == p.name()) return p;
    }
    throw ConfigError("unknown profile '" + name + "' (expected 512, 1024 or 2048)");
}

RowLayout::RowLayout(const MachineConfig& cfg) {
    const int l = cfg.ell, N = cfg.nbits;
    cmd_a = 0;
    cmd_b = l;
    cmd_c = 2 * l;
    mem = 3 * l;
    scr_sub = mem + N;
    scr_min = scr_sub + N;
    addr_a = scr_min + N;
    addr_b = addr_a + l;
    addr_c = addr_b + l;
    pc = addr_c + l;
    pos = pc + l;
    buf_a = pos + l;
    buf_b = buf_a + N;
    buf_c = buf_b + N;
    find_temp = buf_c + N;
    load_temp = find_temp + N;
    tags = load_temp + l;
    ind = tags + N;
    d = ind + 1;
}

std::vector<RowLayout::Region> RowLayout::regions() const {
    const int l = addr_b - addr_a, N = scr_sub - mem;
    return {{"commands", cmd_a, 3 * l}, {"memory", mem, N},     {"scr_sub", scr_sub, N},
            {"scr_min", scr_min, N},    {"addr_a", addr_a, l},  {"addr_b", addr_b, l},
            {"addr_c", addr_c, l},      {"pc", pc, l},          {"pos_enc", pos, l},
            {"buf_a", buf_a, N},        {"buf_b", buf_b, N},    {"buf_c", buf_c, N},
            {"find_temp", find_temp, N}, {"load_temp", load_temp, l}, {"addr_tags", tags, N},
            {"indicator", ind, 1}};
}

}  // namespace loom
