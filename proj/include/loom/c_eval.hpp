// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "loom/ast.hpp"

namespace loom {

// Direct tree-walking evaluation of a parsed unit with nbits-bit wrapping
// words. Storage is static like the compiled form: locals and parameters
// keep their values between calls and between runs of main.
class Evaluator {
public:
    Evaluator(const Unit& unit, int nbits);

    // Runs main once. Throws Error when more than max_ops evaluation steps
    // are needed or an index falls outside its array.
    void run(std::uint64_t max_ops = 10'000'000);

    std::int64_t global(const std::string& name, int index = 0) const;
    void set_global(const std::string& name, int index, std::int64_t value);
    std::uint64_t ops() const { return ops_; }

private:
    enum class Flow { Normal, Break, Continue, Return };

    struct Cell {
        std::vector<std::int64_t> v;
        bool array = false;
    };

    Flow exec(const Stmt& s);
    std::int64_t eval(const Expr& e);
    std::int64_t call(const Expr& e);
    Cell& cell(const std::string& name);
    std::int64_t& element(const Expr& lvalue);
    void tick();

    const Unit& unit_;
    int nbits_;
    std::map<std::string, Cell> globals_;
    std::map<const Decl*, Cell> locals_;
    std::map<const Function*, std::vector<std::int64_t>> params_;
    std::map<const Function*, std::int64_t> rets_;
    std::vector<std::map<std::string, Cell*>> scopes_;
    const Function* fn_ = nullptr;
    std::uint64_t ops_ = 0;
    std::uint64_t budget_ = ~std::uint64_t{0};
};

}  // namespace loom
