// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace loom {

// MSB-first; bit b maps to 2b-1. Values may be given in signed or unsigned
// range of the width; both wrap to the same bit pattern.
std::vector<double> encode_word(std::int64_t value, int width);
void encode_into(std::int64_t value, int width, double* out);

// Snaps each entry to its sign. Entries in the dead band |x| < 0.5 raise
// DecodeError.
std::int64_t decode_word(std::span<const double> bits, bool is_signed);

// Two's complement wrap of v into width bits, returned in signed range.
std::int64_t wrap_signed(std::int64_t v, int width);
std::uint64_t wrap_unsigned(std::int64_t v, int width);

}  // namespace loom
