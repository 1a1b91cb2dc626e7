// SPDX-License-Identifier: Apache-2.0
#include "loom/bipolar.hpp"

#include <cmath>
#include <string>

#include "loom/config.hpp"

namespace loom {

std::int64_t wrap_signed(std::int64_t v, int width) {
    const std::uint64_t u = wrap_unsigned(v, width);
    const std::uint64_t half = std::uint64_t{1} << (width - 1);
    return u >= half ? static_cast<std::int64_t>(u) - static_cast<std::int64_t>(half << 1)
                     : static_cast<std::int64_t>(u);
}

std::uint64_t wrap_unsigned(std::int64_t v, int width) {
    const std::uint64_t mask = width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
    return static_cast<std::uint64_t>(v) & mask;
}

void encode_into(std::int64_t value, int width, double* out) {
    if (width < 1 || width > 62) throw RangeError("encode width out of range");
    const std::int64_t lo = -(std::int64_t{1} << (width - 1));
    const std::int64_t hi = (std::int64_t{1} << width) - 1;
    if (value < lo || value > hi) {
        throw RangeError("value " + std::to_string(value) + " not representable in " +
                         std::to_string(width) + " bits");
    }
    const std::uint64_t u = wrap_unsigned(value, width);
    for (int i = 0; i < width; ++i) {
        const int bit = static_cast<int>((u >> (width - 1 - i)) & 1U);
        out[i] = bit ? 1.0 : -1.0;
    }
}

std::vector<double> encode_word(std::int64_t value, int width) {
    std::vector<double> out(static_cast<std::size_t>(width));
    encode_into(value, width, out.data());
    return out;
}

std::int64_t decode_word(std::span<const double> bits, bool is_signed) {
    const int width = static_cast<int>(bits.size());
    std::uint64_t u = 0;
    for (int i = 0; i < width; ++i) {
        const double x = bits[static_cast<std::size_t>(i)];
        if (!(std::fabs(x) >= 0.5)) {
            throw DecodeError("bit " + std::to_string(i) + " in dead band (" + std::to_string(x) + ")");
        }
        u = (u << 1) | (x > 0 ? 1U : 0U);
    }
    return is_signed ? wrap_signed(static_cast<std::int64_t>(u), width) : static_cast<std::int64_t>(u);
}

}  // namespace loom
