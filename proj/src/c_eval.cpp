// SPDX-License-Identifier: Apache-2.0
#include "loom/c_eval.hpp"

namespace loom {

Evaluator::Evaluator(const Unit& unit, int nbits) : unit_(unit), nbits_(nbits) {
    for (const auto& g : unit_.globals) {
        Cell c;
        c.array = g->size > 0;
        c.v.assign(static_cast<std::size_t>(std::max(g->size, 1)), 0);
        for (std::size_t k = 0; k < g->init.size(); ++k) {
            scopes_.clear();
            c.v[k] = cword::wrap(eval(*g->init[k]), nbits_);
        }
        globals_[g->name] = std::move(c);
    }
}

void Evaluator::tick() {
    if (++ops_ > budget_) throw Error("evaluation step budget exhausted");
}

void Evaluator::run(std::uint64_t max_ops) {
    const Function* main_fn = unit_.find("main");
    if (!main_fn) throw Error("no main function");
    ops_ = 0;
    budget_ = max_ops;
    fn_ = nullptr;
    scopes_.assign(1, {});
    exec(*main_fn->body);
}

std::int64_t Evaluator::global(const std::string& name, int index) const {
    const auto& c = globals_.at(name);
    return c.v.at(static_cast<std::size_t>(index));
}

void Evaluator::set_global(const std::string& name, int index, std::int64_t value) {
    globals_.at(name).v.at(static_cast<std::size_t>(index)) = cword::wrap(value, nbits_);
}

Evaluator::Cell& Evaluator::cell(const std::string& name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
        auto f = it->find(name);
        if (f != it->end()) return *f->second;
    }
    auto g = globals_.find(name);
    if (g == globals_.end()) throw Error("undeclared identifier '" + name + "'");
    return g->second;
}

std::int64_t& Evaluator::element(const Expr& e) {
    Cell& c = cell(e.name);
    if (e.kind == Expr::Kind::Var) return c.v[0];
    const std::int64_t k = eval(*e.args[0]);
    if (k < 0 || k >= static_cast<std::int64_t>(c.v.size())) {
        throw Error("index " + std::to_string(k) + " out of bounds for '" + e.name + "'");
    }
    return c.v[static_cast<std::size_t>(k)];
}

std::int64_t Evaluator::eval(const Expr& e) {
    tick();
    const int N = nbits_;
    switch (e.kind) {
        case Expr::Kind::Int: return cword::wrap(e.value, N);
        case Expr::Kind::Var:
        case Expr::Kind::Index: return element(e);
        case Expr::Kind::Unary: return cword::unary(e.op, eval(*e.args[0]), N);
        case Expr::Kind::Binary: {
            const std::int64_t a = eval(*e.args[0]);
            if (e.op == "&&" && a == 0) return 0;
            if (e.op == "||" && a != 0) return 1;
            return cword::binary(e.op, a, eval(*e.args[1]), N);
        }
        case Expr::Kind::Call: return call(e);
    }
    return 0;
}

std::int64_t Evaluator::call(const Expr& e) {
    const int N = nbits_;
    if (e.name == "swap") {
        std::int64_t& a = element(*e.args[0]);
        const std::int64_t va = a;
        std::int64_t& b = element(*e.args[1]);
        const std::int64_t vb = b;
        element(*e.args[0]) = vb;
        element(*e.args[1]) = va;
        return 0;
    }
    if (e.name == "abs") {
        const std::int64_t a = eval(*e.args[0]);
        return a < 0 ? cword::wrap(-a, N) : a;
    }
    if (is_builtin(e.name)) {
        const std::int64_t a = eval(*e.args[0]);
        const std::int64_t b = eval(*e.args[1]);
        if (e.name == "mul") return cword::mul(a, b, N);
        const bool lt = cword::compare("<", a, b, N);
        if (e.name == "min") return lt ? a : b;
        return lt ? b : a;
    }
    const Function* f = unit_.find(e.name);
    if (!f) throw Error("call to undeclared function '" + e.name + "'");
    std::vector<std::int64_t> args;
    for (const auto& a : e.args) args.push_back(eval(*a));
    auto& params = params_[f];
    params = args;
    auto saved = std::move(scopes_);
    scopes_.assign(1, {});
    std::vector<Cell> param_cells(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        param_cells[i].v = {params[i]};
        scopes_.back()[f->params[i]] = &param_cells[i];
    }
    const Function* outer = fn_;
    fn_ = f;
    exec(*f->body);
    fn_ = outer;
    for (std::size_t i = 0; i < params.size(); ++i) params[i] = param_cells[i].v[0];
    scopes_ = std::move(saved);
    return rets_[f];
}

Evaluator::Flow Evaluator::exec(const Stmt& s) {
    tick();
    switch (s.kind) {
        case Stmt::Kind::Block: {
            scopes_.emplace_back();
            Flow f = Flow::Normal;
            for (const auto& c : s.body) {
                f = exec(*c);
                if (f != Flow::Normal) break;
            }
            scopes_.pop_back();
            return f;
        }
        case Stmt::Kind::Decl: {
            const Decl& d = *s.decl;
            Cell& c = locals_[&d];
            if (c.v.empty()) {
                c.array = d.size > 0;
                c.v.assign(static_cast<std::size_t>(std::max(d.size, 1)), 0);
            }
            scopes_.back()[d.name] = &c;
            for (std::size_t k = 0; k < d.init.size(); ++k) c.v[k] = eval(*d.init[k]);
            return Flow::Normal;
        }
        case Stmt::Kind::Assign: {
            if (s.op == "=") {
                const std::int64_t v = eval(*s.expr);
                element(*s.target) = v;
                return Flow::Normal;
            }
            const std::int64_t v = eval(*s.expr);
            std::int64_t& t = element(*s.target);
            t = cword::binary(s.op.substr(0, s.op.size() - 1), t, v, nbits_);
            return Flow::Normal;
        }
        case Stmt::Kind::IncDec: {
            std::int64_t& t = element(*s.target);
            t = cword::wrap(t + (s.op == "++" ? 1 : -1), nbits_);
            return Flow::Normal;
        }
        case Stmt::Kind::If:
            if (eval(*s.expr) != 0) return exec(*s.body[0]);
            return s.body.size() > 1 ? exec(*s.body[1]) : Flow::Normal;
        case Stmt::Kind::While:
            while (eval(*s.expr) != 0) {
                const Flow f = exec(*s.body[0]);
                if (f == Flow::Break) break;
                if (f == Flow::Return) return f;
            }
            return Flow::Normal;
        case Stmt::Kind::For: {
            scopes_.emplace_back();
            Flow out = Flow::Normal;
            for (exec(*s.init); eval(*s.expr) != 0; exec(*s.step)) {
                const Flow f = exec(*s.body[0]);
                if (f == Flow::Break) break;
                if (f == Flow::Return) {
                    out = f;
                    break;
                }
            }
            scopes_.pop_back();
            return out;
        }
        case Stmt::Kind::Break: return Flow::Break;
        case Stmt::Kind::Continue: return Flow::Continue;
        case Stmt::Kind::Return:
            if (s.expr && fn_) rets_[fn_] = eval(*s.expr);
            return Flow::Return;
        case Stmt::Kind::Expr: call(*s.expr); return Flow::Normal;
    }
    return Flow::Normal;
}

}  // namespace loom
