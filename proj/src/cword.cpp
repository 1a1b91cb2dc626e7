// SPDX-License-Identifier: Apache-2.0
#include "loom/ast.hpp"
#include "loom/bipolar.hpp"
#include "loom/isa.hpp"

namespace loom::cword {

std::int64_t wrap(std::int64_t v, int nbits) { return wrap_signed(v, nbits); }

bool compare(const std::string& op, std::int64_t a, std::int64_t b, int nbits) {
    if (op == "<") return wrap(a - b, nbits) < 0;
    if (op == "<=") return wrap(a - b - 1, nbits) < 0;
    if (op == ">") return compare("<", b, a, nbits);
    if (op == ">=") return compare("<=", b, a, nbits);
    if (op == "==") return wrap(a, nbits) == wrap(b, nbits);
    if (op == "!=") return wrap(a, nbits) != wrap(b, nbits);
    throw Error("not a comparison: " + op);
}

std::int64_t mul(std::int64_t a, std::int64_t b, int nbits) {
    const std::int64_t sign = alu(Opcode::XOR, a, b, nbits);
    const std::int64_t x = wrap(a, nbits) < 0 ? wrap(-a, nbits) : wrap(a, nbits);
    const std::int64_t y = wrap(b, nbits) < 0 ? wrap(-b, nbits) : wrap(b, nbits);
    std::int64_t acc = x;
    for (int i = 0; i < nbits; ++i) acc = alu(Opcode::MULACC, acc, y, nbits);
    return sign < 0 ? wrap(-acc, nbits) : acc;
}

std::int64_t binary(const std::string& op, std::int64_t a, std::int64_t b, int nbits) {
    if (op == "+") return wrap(a + b, nbits);
    if (op == "-") return wrap(a - b, nbits);
    if (op == "*") return mul(a, b, nbits);
    if (op == "&") return alu(Opcode::AND, a, b, nbits);
    if (op == "|") return alu(Opcode::OR, a, b, nbits);
    if (op == "^") return alu(Opcode::XOR, a, b, nbits);
    if (op == "<<" || op == ">>") {
        std::int64_t r = wrap(a, nbits);
        for (std::int64_t i = 0; i < b && i < nbits; ++i) r = alu(op == "<<" ? Opcode::SHL : Opcode::SHR, r, 0, nbits);
        return r;
    }
    if (op == "&&") return (wrap(a, nbits) != 0 && wrap(b, nbits) != 0) ? 1 : 0;
    if (op == "||") return (wrap(a, nbits) != 0 || wrap(b, nbits) != 0) ? 1 : 0;
    return compare(op, a, b, nbits) ? 1 : 0;
}

std::int64_t unary(const std::string& op, std::int64_t a, int nbits) {
    if (op == "-") return wrap(-a, nbits);
    if (op == "~") return wrap(~a, nbits);
    if (op == "!") return wrap(a, nbits) == 0 ? 1 : 0;
    throw Error("not a unary operator: " + op);
}

}  // namespace loom::cword
