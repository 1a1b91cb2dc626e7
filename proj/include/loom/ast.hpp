// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "loom/config.hpp"

namespace loom {

struct SourceLoc {
    int line = 1;
    int col = 1;
};

class CompileError : public Error {
public:
    enum class Kind { Lex, Parse, Semantic, Capacity };
    CompileError(Kind kind, SourceLoc loc, const std::string& msg) : Error(msg), kind_(kind), loc_(loc) {}
    Kind kind() const { return kind_; }
    SourceLoc loc() const { return loc_; }

private:
    Kind kind_;
    SourceLoc loc_;
};

// "<file>:<line>:<col>: error: <message>"
std::string format_diagnostic(const std::string& file, const CompileError& e);

enum class Tok { Ident, Int, Keyword, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
    SourceLoc loc;
};

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;

struct Expr {
    enum class Kind { Int, Var, Index, Unary, Binary, Call };
    Kind kind = Kind::Int;
    SourceLoc loc;
    std::int64_t value = 0;  // Int
    std::string name;        // Var, Index, Call
    std::string op;          // Unary, Binary
    std::vector<ExprPtr> args;  // operands, index, or call arguments
};

// Declarations are statements so locals and globals share one shape.
struct Decl {
    std::string name;
    int size = 0;  // 0 for scalars
    std::vector<ExprPtr> init;
    SourceLoc loc;
};

struct Stmt {
    enum class Kind { Block, Decl, Assign, IncDec, If, While, For, Break, Continue, Return, Expr };
    Kind kind = Kind::Block;
    SourceLoc loc;
    std::vector<StmtPtr> body;     // Block items; If: then, else; loops: body
    std::unique_ptr<Decl> decl;
    ExprPtr target;                // Assign, IncDec
    std::string op;                // "=", "+=", ..., "++", "--"
    ExprPtr expr;                  // Assign rhs, condition, Return value, Expr call
    StmtPtr init;                  // For
    StmtPtr step;                  // For
};

struct Function {
    std::string name;
    bool returns_value = false;
    std::vector<std::string> params;
    StmtPtr body;
    SourceLoc loc;
};

struct Unit {
    std::vector<std::unique_ptr<Decl>> globals;
    std::vector<std::unique_ptr<Function>> functions;
    const Function* find(const std::string& name) const;
};

bool is_builtin(const std::string& name);

std::vector<Token> lex(const std::string& source);
Unit parse(const std::vector<Token>& tokens);
Unit parse_source(const std::string& source);

// Word semantics shared by constant folding, code generation and the
// reference evaluator.
namespace cword {
std::int64_t wrap(std::int64_t v, int nbits);
// Comparisons are defined on wrapped differences:
//   a < b  iff wrap(a - b) < 0,   a <= b iff wrap(a - b - 1) < 0,
//   a > b  iff b < a,             a >= b iff b <= a.
bool compare(const std::string& op, std::int64_t a, std::int64_t b, int nbits);
// Sign-magnitude shift-add product, the exact result of the mul builtin.
std::int64_t mul(std::int64_t a, std::int64_t b, int nbits);
std::int64_t binary(const std::string& op, std::int64_t a, std::int64_t b, int nbits);
std::int64_t unary(const std::string& op, std::int64_t a, int nbits);
}  // namespace cword

}  // namespace loom
