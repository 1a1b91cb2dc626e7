// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "loom/compiler.hpp"
#include "loom/isa.hpp"

namespace loom {

namespace {

using K = CompileError::Kind;

struct Ref {
    enum class Kind { None, Mem, Const, Temp, Label };
    Kind kind = Kind::None;
    std::int64_t v = 0;
    friend bool operator==(const Ref&, const Ref&) = default;
};

Ref mem(int slot) { return {Ref::Kind::Mem, slot}; }
Ref label_ref(int id) { return {Ref::Kind::Label, id}; }

struct SymIns {
    Opcode op;
    Ref b, c;
};

struct VarInfo {
    int slot = 0;
    int size = 0;
};

bool commutative(const std::string& op) { return op == "+" || op == "&" || op == "|" || op == "^"; }
bool is_compare(const std::string& op) {
    return op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=";
}

Opcode arith_opcode(const std::string& op) {
    if (op == "+") return Opcode::ADD;
    if (op == "-") return Opcode::SUB;
    if (op == "&") return Opcode::AND;
    if (op == "|") return Opcode::OR;
    return Opcode::XOR;
}

class Codegen;

// A memory operand; owns its temp slot when it is one.
class Operand {
public:
    Operand(Ref r, Codegen* owner = nullptr) : r_(r), owner_(owner) {}
    Operand(Operand&& o) noexcept : r_(o.r_), owner_(o.owner_) { o.owner_ = nullptr; }
    Operand& operator=(Operand&&) = delete;
    Operand(const Operand&) = delete;
    ~Operand();
    Ref ref() const { return r_; }

private:
    Ref r_;
    Codegen* owner_;
};

class Codegen {
public:
    Codegen(const Unit& unit, const MachineConfig& cfg, const CompileOptions& opt)
        : unit_(unit), cfg_(cfg), opt_(opt) {}

    CompileResult run();

    void release(Ref r) { temps_in_use_.erase(r.v); }

private:
    [[noreturn]] void fail(K kind, SourceLoc loc, const std::string& msg) const { throw CompileError(kind, loc, msg); }

    // ---- emission ----
    void emit(Opcode op, Ref b = {}, Ref c = {}) { code_.push_back({op, b, c}); }
    int new_label() {
        labels_.push_back(-1);
        return static_cast<int>(labels_.size()) - 1;
    }
    void place(int label) { labels_[static_cast<std::size_t>(label)] = static_cast<int>(code_.size()); }

    Ref konst(std::int64_t v) {
        v = cword::wrap(v, cfg_.nbits);
        auto it = const_index_.find(v);
        if (it == const_index_.end()) {
            it = const_index_.emplace(v, static_cast<int>(const_values_.size())).first;
            const_values_.push_back(v);
        }
        return {Ref::Kind::Const, it->second};
    }

    Operand temp() {
        int i = 0;
        while (temps_in_use_.count(i)) ++i;
        temps_in_use_.insert(i);
        max_temps_ = std::max(max_temps_, i + 1);
        return Operand({Ref::Kind::Temp, i}, this);
    }

    int alloc(int count) {
        const int slot = next_slot_;
        next_slot_ += count;
        return slot;
    }

    // ---- names ----
    const VarInfo& lookup(const std::string& name, SourceLoc loc) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return f->second;
        }
        fail(K::Semantic, loc, "undeclared identifier '" + name + "'");
    }

    void declare(const Decl& d, const std::string& qualified) {
        auto& scope = scopes_.back();
        if (scope.count(d.name)) fail(K::Semantic, d.loc, "redeclaration of '" + d.name + "'");
        auto it = decl_slots_.find(&d);
        if (it == decl_slots_.end()) {
            it = decl_slots_.emplace(&d, alloc(std::max(d.size, 1))).first;
            symbols_.push_back({qualified, it->second, d.size});
        }
        scope[d.name] = {it->second, d.size};
    }

    std::string qualify(const std::string& name) const {
        return fn_ ? fn_->name + "." + name : (in_main_ ? "main." + name : name);
    }

    // ---- constant folding ----
    std::optional<std::int64_t> fold(const Expr& e) const {
        const int N = cfg_.nbits;
        switch (e.kind) {
            case Expr::Kind::Int:
                if (e.value >= (std::int64_t{1} << N)) {
                    fail(K::Semantic, e.loc, "literal " + std::to_string(e.value) + " does not fit in " +
                                                 std::to_string(N) + " bits");
                }
                return cword::wrap(e.value, N);
            case Expr::Kind::Unary:
                if (auto a = fold(*e.args[0])) return cword::unary(e.op, *a, N);
                return std::nullopt;
            case Expr::Kind::Binary: {
                auto a = fold(*e.args[0]);
                auto b = fold(*e.args[1]);
                if (a && b) return cword::binary(e.op, *a, *b, N);
                return std::nullopt;
            }
            case Expr::Kind::Call: {
                if (!is_builtin(e.name) || e.name == "swap") return std::nullopt;
                std::vector<std::int64_t> v;
                for (const auto& a : e.args) {
                    auto f = fold(*a);
                    if (!f) return std::nullopt;
                    v.push_back(*f);
                }
                if (e.name == "abs") {
                    if (v.size() != 1) return std::nullopt;
                    return v[0] < 0 ? cword::wrap(-v[0], N) : v[0];
                }
                if (v.size() != 2) return std::nullopt;
                if (e.name == "mul") return cword::mul(v[0], v[1], N);
                const bool lt = cword::compare("<", v[0], v[1], N);
                if (e.name == "min") return lt ? v[0] : v[1];
                return lt ? v[1] : v[0];
            }
            default: return std::nullopt;
        }
    }

    // ---- analysis ----
    bool has_call(const Expr& e) const {
        if (e.kind == Expr::Kind::Call && !is_builtin(e.name)) return true;
        return std::any_of(e.args.begin(), e.args.end(), [&](const ExprPtr& a) { return has_call(*a); });
    }

    // Whether evaluating e may read memory operand r. Calls are assumed to.
    bool reads(const Expr& e, Ref r) const {
        if (r.kind != Ref::Kind::Mem) return false;
        switch (e.kind) {
            case Expr::Kind::Var: {
                const auto& v = lookup(e.name, e.loc);
                return v.slot == r.v;
            }
            case Expr::Kind::Index: {
                const auto& v = lookup(e.name, e.loc);
                if (auto k = fold(*e.args[0])) return v.slot + *k == r.v;
                return (r.v >= v.slot && r.v < v.slot + v.size) || reads(*e.args[0], r);
            }
            case Expr::Kind::Call:
                if (!is_builtin(e.name)) return true;
                [[fallthrough]];
            default:
                return std::any_of(e.args.begin(), e.args.end(), [&](const ExprPtr& a) { return reads(*a, r); });
        }
    }

    // Scalar variable or constant-index element; nullopt for variable index.
    std::optional<Ref> direct(const Expr& e) const {
        if (e.kind == Expr::Kind::Var) {
            const auto& v = lookup(e.name, e.loc);
            if (v.size > 0) fail(K::Semantic, e.loc, "array '" + e.name + "' used without an index");
            return mem(v.slot);
        }
        if (e.kind == Expr::Kind::Index) {
            const auto& v = lookup(e.name, e.loc);
            if (v.size == 0) fail(K::Semantic, e.loc, "'" + e.name + "' is not an array");
            if (auto k = fold(*e.args[0])) {
                if (*k < 0 || *k >= v.size) {
                    fail(K::Semantic, e.loc, "index " + std::to_string(*k) + " out of bounds for '" + e.name + "'");
                }
                return mem(v.slot + static_cast<int>(*k));
            }
        }
        return std::nullopt;
    }

    // ---- expressions ----
    Operand value_of(const Expr& e) {
        if (auto c = fold(e)) return Operand(konst(*c));
        if (auto d = direct(e)) return Operand(*d);
        Operand t = temp();
        gen(t.ref(), e);
        return t;
    }

    // Left operand is copied out first when the right one may run a call.
    std::pair<Operand, Operand> pair_of(const Expr& a, const Expr& b) {
        Operand A = has_call(b) && !fold(a) ? materialize(a) : value_of(a);
        Operand B = value_of(b);
        return {std::move(A), std::move(B)};
    }

    Operand materialize(const Expr& e) {
        Operand t = temp();
        gen(t.ref(), e);
        return t;
    }

    // Pointer operand for element idx of an array at base.
    Operand pointer(const Expr& idx, int base) {
        const Expr* inner = &idx;
        std::int64_t off = base;
        if (idx.kind == Expr::Kind::Binary && (idx.op == "+" || idx.op == "-")) {
            if (auto k = fold(*idx.args[1])) {
                inner = idx.args[0].get();
                off += idx.op == "+" ? *k : -*k;
            }
        }
        off = cword::wrap(off, cfg_.nbits);
        if (off == 0) return value_of(*inner);
        Operand p = temp();
        gen(p.ref(), *inner);
        emit(Opcode::ADD, p.ref(), konst(off));
        return p;
    }

    // dest = e, where dest may appear in e.
    void assign(Ref dest, const Expr& e) {
        if (!fold(e) && reads(e, dest)) {
            const bool in_place = e.kind == Expr::Kind::Binary && !is_compare(e.op) && e.op != "&&" &&
                                  e.op != "||" && e.op != "*";
            if (in_place && direct(*e.args[0]) == dest && !reads(*e.args[1], dest)) {
                gen(dest, e);
                return;
            }
            if (in_place && commutative(e.op) && direct(*e.args[1]) == dest && !reads(*e.args[0], dest)) {
                gen_binary(dest, e.op, *e.args[1], *e.args[0], e.loc);
                return;
            }
            Operand t = materialize(e);
            emit(Opcode::MOV, dest, t.ref());
            return;
        }
        gen(dest, e);
    }

    // dest = e, where e does not read dest except as the left operand.
    void gen(Ref dest, const Expr& e) {
        if (auto c = fold(e)) {
            emit(Opcode::MOV, dest, konst(*c));
            return;
        }
        if (auto d = direct(e)) {
            if (*d != dest) emit(Opcode::MOV, dest, *d);
            return;
        }
        switch (e.kind) {
            case Expr::Kind::Index: {
                const auto& v = lookup(e.name, e.loc);
                Operand p = pointer(*e.args[0], v.slot);
                emit(Opcode::LOAD, dest, p.ref());
                return;
            }
            case Expr::Kind::Unary:
                if (e.op == "-") {
                    Operand a = value_of(*e.args[0]);
                    emit(Opcode::MOV, dest, konst(0));
                    emit(Opcode::SUB, dest, a.ref());
                } else if (e.op == "~") {
                    gen(dest, *e.args[0]);
                    emit(Opcode::XOR, dest, konst(-1));
                } else {
                    gen_bool(dest, e);
                }
                return;
            case Expr::Kind::Binary:
                if (is_compare(e.op) || e.op == "&&" || e.op == "||") {
                    gen_bool(dest, e);
                } else if (e.op == "*") {
                    auto [a, b] = pair_of(*e.args[0], *e.args[1]);
                    Operand r = mul(a.ref(), b.ref());
                    emit(Opcode::MOV, dest, r.ref());
                } else if (fold(*e.args[0]) && commutative(e.op)) {
                    gen_binary(dest, e.op, *e.args[1], *e.args[0], e.loc);
                } else {
                    gen_binary(dest, e.op, *e.args[0], *e.args[1], e.loc);
                }
                return;
            case Expr::Kind::Call:
                gen_call(&dest, e);
                return;
            default:
                fail(K::Semantic, e.loc, "unsupported expression");
        }
    }

    void gen_binary(Ref dest, const std::string& op, const Expr& lhs, const Expr& rhs, SourceLoc loc) {
        gen(dest, lhs);
        if (op == "<<" || op == ">>") {
            shift(dest, op, rhs, loc);
        } else {
            apply(dest, op, rhs);
        }
    }

    void shift(Ref dest, const std::string& op, const Expr& amount, SourceLoc loc) {
        auto k = fold(amount);
        if (!k) fail(K::Semantic, loc, "shift amount must be a constant");
        if (*k < 0) fail(K::Semantic, loc, "negative shift amount");
        for (std::int64_t i = 0; i < std::min<std::int64_t>(*k, cfg_.nbits); ++i) {
            emit(op == "<<" ? Opcode::SHL : Opcode::SHR, dest);
        }
    }

    // dest = dest op rhs, where rhs does not read dest.
    void apply(Ref dest, const std::string& op, const Expr& rhs) {
        if (auto k = fold(rhs); k && (op == "+" || op == "-") && (*k == 1 || *k == -1)) {
            emit((op == "+") == (*k == 1) ? Opcode::INC : Opcode::DEC, dest);
            return;
        }
        if (auto k = fold(rhs); k && *k == 0 && (op == "+" || op == "-" || op == "|" || op == "^")) return;
        Operand b = value_of(rhs);
        emit(arith_opcode(op), dest, b.ref());
    }

    void gen_bool(Ref dest, const Expr& e) {
        const int end = new_label();
        emit(Opcode::MOV, dest, konst(0));
        branch(e, false, end);
        emit(Opcode::MOV, dest, konst(1));
        place(end);
    }

    // Sign-magnitude shift-add multiply; result in a fresh temp.
    Operand mul(Ref a, Ref b) {
        Operand sg = temp(), x = temp(), y = temp(), t = temp();
        emit(Opcode::MOV, sg.ref(), a);
        emit(Opcode::XOR, sg.ref(), b);
        for (auto [dst, src] : {std::pair{x.ref(), a}, std::pair{y.ref(), b}}) {
            emit(Opcode::MOV, dst, src);
            emit(Opcode::MOV, t.ref(), konst(0));
            emit(Opcode::SUB, t.ref(), src);
            emit(Opcode::CMOV, dst, t.ref());
        }
        for (int i = 0; i < cfg_.nbits; ++i) emit(Opcode::MULACC, x.ref(), y.ref());
        const int end = new_label();
        emit(Opcode::MOV, t.ref(), konst(0));
        emit(Opcode::SUB, t.ref(), x.ref());
        emit(Opcode::CMP, sg.ref(), label_ref(end));
        emit(Opcode::MOV, t.ref(), x.ref());
        place(end);
        used_mul_ = true;
        return t;
    }

    // Calls in value position (dest set) or statement position.
    void gen_call(const Ref* dest, const Expr& e) {
        const auto argc = e.args.size();
        auto want = [&](std::size_t n) {
            if (argc != n) {
                fail(K::Semantic, e.loc, "'" + e.name + "' expects " + std::to_string(n) + " argument(s)");
            }
        };
        if (e.name == "swap") {
            want(2);
            if (dest) fail(K::Semantic, e.loc, "swap has no value");
            gen_swap(*e.args[0], *e.args[1], e.loc);
            return;
        }
        if (is_builtin(e.name)) {
            if (!dest) fail(K::Semantic, e.loc, "value of '" + e.name + "' is unused");
            if (e.name == "abs") {
                want(1);
                Operand a = value_of(*e.args[0]);
                Operand t = temp();
                emit(Opcode::MOV, *dest, a.ref());
                emit(Opcode::MOV, t.ref(), konst(0));
                emit(Opcode::SUB, t.ref(), a.ref());
                emit(Opcode::CMOV, *dest, t.ref());
                return;
            }
            want(2);
            auto [a, b] = pair_of(*e.args[0], *e.args[1]);
            if (e.name == "mul") {
                Operand r = mul(a.ref(), b.ref());
                emit(Opcode::MOV, *dest, r.ref());
                return;
            }
            // min: a < b ? a : b,  max: a < b ? b : a
            const bool is_min = e.name == "min";
            Operand t = temp();
            const int end = new_label();
            emit(Opcode::MOV, *dest, is_min ? a.ref() : b.ref());
            emit(Opcode::MOV, t.ref(), a.ref());
            emit(Opcode::SUB, t.ref(), b.ref());
            emit(Opcode::CMP, t.ref(), label_ref(end));
            emit(Opcode::MOV, *dest, is_min ? b.ref() : a.ref());
            place(end);
            return;
        }
        const Function* f = unit_.find(e.name);
        if (!f) fail(K::Semantic, e.loc, "call to undeclared function '" + e.name + "'");
        if (dest && !f->returns_value) fail(K::Semantic, e.loc, "void function '" + e.name + "' used as a value");
        const Ref ret = inline_call(*f, e);
        if (dest) emit(Opcode::MOV, *dest, ret);
    }

    Ref inline_call(const Function& f, const Expr& call) {
        if (fn_) fail(K::Semantic, call.loc, "call to '" + f.name + "' inside '" + fn_->name + "' (inlining is single-level)");
        if (f.name == "main") fail(K::Semantic, call.loc, "main cannot be called");
        if (call.args.size() != f.params.size()) {
            fail(K::Semantic, call.loc, "'" + f.name + "' expects " + std::to_string(f.params.size()) + " argument(s)");
        }
        auto& params = param_slots_[&f];
        if (params.empty() && !f.params.empty()) {
            for (const auto& p : f.params) {
                params.push_back(alloc(1));
                symbols_.push_back({f.name + "." + p, params.back(), 0});
            }
        }
        auto [rit, fresh] = ret_slots_.emplace(&f, 0);
        if (fresh) rit->second = f.returns_value ? alloc(1) : -1;

        const bool staged = std::any_of(call.args.begin(), call.args.end(), [&](const ExprPtr& a) { return has_call(*a); });
        if (staged) {
            std::vector<Operand> vals;
            for (const auto& a : call.args) vals.push_back(materialize(*a));
            for (std::size_t i = 0; i < vals.size(); ++i) emit(Opcode::MOV, mem(params[i]), vals[i].ref());
        } else {
            for (std::size_t i = 0; i < call.args.size(); ++i) assign(mem(params[i]), *call.args[i]);
        }

        auto saved_scopes = std::move(scopes_);
        auto saved_loops = std::move(loops_);
        scopes_ = {saved_scopes.front(), {}};
        loops_.clear();
        for (std::size_t i = 0; i < f.params.size(); ++i) {
            if (scopes_.back().count(f.params[i])) fail(K::Semantic, f.loc, "duplicate parameter '" + f.params[i] + "'");
            scopes_.back()[f.params[i]] = {params[i], 0};
        }
        fn_ = &f;
        fn_end_ = new_label();
        stmt(*f.body);
        place(fn_end_);
        fn_ = nullptr;
        scopes_ = std::move(saved_scopes);
        loops_ = std::move(saved_loops);
        return f.returns_value ? mem(rit->second) : Ref{};
    }

    // ---- branches ----
    // Jump to label when truth(e) == when; fall through otherwise.
    void branch(const Expr& e, bool when, int label) {
        if (auto c = fold(e)) {
            if ((*c != 0) == when) emit(Opcode::JMP, {}, label_ref(label));
            return;
        }
        if (e.kind == Expr::Kind::Unary && e.op == "!") {
            branch(*e.args[0], !when, label);
            return;
        }
        if (e.kind == Expr::Kind::Binary && (e.op == "&&" || e.op == "||")) {
            const bool all = e.op == "&&";
            if (when != all) {
                // || jumping on true, && jumping on false: either operand decides
                branch(*e.args[0], when, label);
                branch(*e.args[1], when, label);
            } else {
                const int skip = new_label();
                branch(*e.args[0], !when, skip);
                branch(*e.args[1], when, label);
                place(skip);
            }
            return;
        }
        if (e.kind == Expr::Kind::Binary && is_compare(e.op)) {
            compare_branch(e.op, *e.args[0], *e.args[1], when, label);
            return;
        }
        Operand v = value_of(e);
        emit(when ? Opcode::JNZ : Opcode::JZ, v.ref(), label_ref(label));
    }

    void compare_branch(const std::string& op, const Expr& a, const Expr& b, bool when, int label) {
        if (op == "==" || op == "!=") {
            const bool jump_if_equal = (op == "==") == when;
            const Opcode j = jump_if_equal ? Opcode::JZ : Opcode::JNZ;
            const Expr* x = &a;
            const Expr* y = &b;
            if (fold(a) && !fold(b)) std::swap(x, y);
            if (auto k = fold(*y); k && *k == 0) {
                Operand v = value_of(*x);
                emit(j, v.ref(), label_ref(label));
                return;
            }
            Operand t = temp();
            gen(t.ref(), *x);
            {
                Operand r = value_of(*y);
                emit(Opcode::SUB, t.ref(), r.ref());
            }
            emit(j, t.ref(), label_ref(label));
            return;
        }
        // Normalize to x < y or x <= y, negating through the identity
        // !(x < y) == (y <= x) on wrapped differences.
        const Expr* x = &a;
        const Expr* y = &b;
        bool strict = op == "<" || op == ">";
        if (op == ">" || op == ">=") std::swap(x, y);
        if (!when) {
            std::swap(x, y);
            strict = !strict;
        }
        const std::int64_t adj = strict ? 0 : 1;  // test wrap(x - y - adj) < 0
        if (auto ky = fold(*y)) {
            const std::int64_t k = cword::wrap(*ky + adj, cfg_.nbits);
            if (k == 0) {
                Operand v = value_of(*x);
                emit(Opcode::CMP, v.ref(), label_ref(label));
                return;
            }
            Operand t = temp();
            gen(t.ref(), *x);
            emit(Opcode::SUB, t.ref(), konst(k));
            emit(Opcode::CMP, t.ref(), label_ref(label));
            return;
        }
        Operand t = temp();
        if (auto kx = fold(*x)) {
            emit(Opcode::MOV, t.ref(), konst(*kx - adj));
            Operand r = value_of(*y);
            emit(Opcode::SUB, t.ref(), r.ref());
        } else {
            gen(t.ref(), *x);
            Operand r = value_of(*y);
            emit(Opcode::SUB, t.ref(), r.ref());
            if (adj) emit(Opcode::DEC, t.ref());
        }
        emit(Opcode::CMP, t.ref(), label_ref(label));
    }

    // ---- stores ----
    void store(const Expr& target, Ref value) {
        const auto& v = lookup(target.name, target.loc);
        const Expr& idx = *target.args[0];
        if (opt_.use_store) {
            Operand p = pointer(idx, v.slot);
            emit(Opcode::STORE, value, p.ref());
            return;
        }
        Operand i = value_of(idx);
        const int end = new_label();
        for (int k = 0; k < v.size; ++k) {
            const int next = new_label();
            if (k == 0) {
                emit(Opcode::JNZ, i.ref(), label_ref(next));
            } else {
                Operand t = temp();
                emit(Opcode::MOV, t.ref(), i.ref());
                emit(Opcode::SUB, t.ref(), konst(k));
                emit(Opcode::JNZ, t.ref(), label_ref(next));
            }
            emit(Opcode::MOV, mem(v.slot + k), value);
            if (k + 1 < v.size) emit(Opcode::JMP, {}, label_ref(end));
            place(next);
        }
        place(end);
    }

    void gen_swap(const Expr& a, const Expr& b, SourceLoc loc) {
        for (const Expr* e : {&a, &b}) {
            if (e->kind != Expr::Kind::Var && e->kind != Expr::Kind::Index) fail(K::Semantic, loc, "swap needs variables");
        }
        auto da = direct(a);
        auto db = direct(b);
        if (da && db) {
            emit(Opcode::SWAP, *da, *db);
            return;
        }
        if (da || db) {
            const Expr& ind = da ? b : a;
            const Ref d = da ? *da : *db;
            Operand t = materialize(ind);
            emit(Opcode::SWAP, t.ref(), d);
            store(ind, t.ref());
            return;
        }
        Operand ta = materialize(a);
        Operand tb = materialize(b);
        store(a, tb.ref());
        store(b, ta.ref());
    }

    // ---- statements ----
    void stmt(const Stmt& s) {
        switch (s.kind) {
            case Stmt::Kind::Block:
                scopes_.emplace_back();
                for (const auto& c : s.body) stmt(*c);
                scopes_.pop_back();
                return;
            case Stmt::Kind::Decl: {
                const Decl& d = *s.decl;
                if (d.size > 0 && d.init.size() > static_cast<std::size_t>(d.size)) {
                    fail(K::Semantic, d.loc, "too many initializers for '" + d.name + "'");
                }
                declare(d, qualify(d.name));
                const int slot = lookup(d.name, d.loc).slot;
                for (std::size_t k = 0; k < d.init.size(); ++k) {
                    assign(mem(slot + static_cast<int>(k)), *d.init[k]);
                }
                return;
            }
            case Stmt::Kind::Assign: {
                const Expr& tgt = *s.target;
                const std::string op = s.op == "=" ? "" : s.op.substr(0, s.op.size() - 1);
                if (auto d = direct(tgt)) {
                    if (op.empty()) {
                        assign(*d, *s.expr);
                    } else if (op == "*") {
                        Operand b = value_of(*s.expr);
                        Operand r = mul(*d, b.ref());
                        emit(Opcode::MOV, *d, r.ref());
                    } else if (op == "<<" || op == ">>") {
                        shift(*d, op, *s.expr, s.loc);
                    } else if (reads(*s.expr, *d) && !fold(*s.expr)) {
                        Operand r = materialize(*s.expr);
                        emit(arith_opcode(op), *d, r.ref());
                    } else {
                        apply(*d, op, *s.expr);
                    }
                    return;
                }
                if (op.empty()) {
                    Operand v = value_of(*s.expr);
                    store(tgt, v.ref());
                    return;
                }
                // The right side is evaluated before the element is read.
                const bool shifting = op == "<<" || op == ">>";
                std::optional<Operand> rhs;
                if (!shifting && !fold(*s.expr)) rhs.emplace(value_of(*s.expr));
                Operand cur = materialize(tgt);
                if (op == "*") {
                    Operand prod = mul(cur.ref(), rhs ? rhs->ref() : konst(*fold(*s.expr)));
                    store(tgt, prod.ref());
                    return;
                }
                if (shifting) {
                    shift(cur.ref(), op, *s.expr, s.loc);
                } else if (rhs) {
                    emit(arith_opcode(op), cur.ref(), rhs->ref());
                } else {
                    apply(cur.ref(), op, *s.expr);
                }
                store(tgt, cur.ref());
                return;
            }
            case Stmt::Kind::IncDec: {
                const Opcode op = s.op == "++" ? Opcode::INC : Opcode::DEC;
                if (auto d = direct(*s.target)) {
                    emit(op, *d);
                    return;
                }
                Operand cur = materialize(*s.target);
                emit(op, cur.ref());
                store(*s.target, cur.ref());
                return;
            }
            case Stmt::Kind::If: {
                if (auto c = fold(*s.expr)) {
                    if (*c != 0) {
                        stmt(*s.body[0]);
                    } else if (s.body.size() > 1) {
                        stmt(*s.body[1]);
                    }
                    return;
                }
                const int other = new_label();
                branch(*s.expr, false, other);
                stmt(*s.body[0]);
                if (s.body.size() > 1) {
                    const int end = new_label();
                    emit(Opcode::JMP, {}, label_ref(end));
                    place(other);
                    stmt(*s.body[1]);
                    place(end);
                } else {
                    place(other);
                }
                return;
            }
            case Stmt::Kind::While: {
                const int top = new_label(), end = new_label();
                place(top);
                branch(*s.expr, false, end);
                loops_.push_back({end, top});
                stmt(*s.body[0]);
                loops_.pop_back();
                emit(Opcode::JMP, {}, label_ref(top));
                place(end);
                return;
            }
            case Stmt::Kind::For: {
                scopes_.emplace_back();
                stmt(*s.init);
                const int top = new_label(), cont = new_label(), end = new_label();
                place(top);
                branch(*s.expr, false, end);
                loops_.push_back({end, cont});
                stmt(*s.body[0]);
                loops_.pop_back();
                place(cont);
                stmt(*s.step);
                emit(Opcode::JMP, {}, label_ref(top));
                place(end);
                scopes_.pop_back();
                return;
            }
            case Stmt::Kind::Break:
            case Stmt::Kind::Continue:
                if (loops_.empty()) fail(K::Semantic, s.loc, "'" + std::string(s.kind == Stmt::Kind::Break ? "break" : "continue") + "' outside a loop");
                emit(Opcode::JMP, {},
                     label_ref(s.kind == Stmt::Kind::Break ? loops_.back().first : loops_.back().second));
                return;
            case Stmt::Kind::Return:
                if (!fn_) {
                    if (s.expr) fail(K::Semantic, s.loc, "main cannot return a value");
                    emit(Opcode::HALT);
                    return;
                }
                if (s.expr && !fn_->returns_value) fail(K::Semantic, s.loc, "void function returns a value");
                if (!s.expr && fn_->returns_value) fail(K::Semantic, s.loc, "missing return value");
                if (s.expr) assign(mem(ret_slots_.at(fn_)), *s.expr);
                emit(Opcode::JMP, {}, label_ref(fn_end_));
                return;
            case Stmt::Kind::Expr:
                if (s.expr->kind != Expr::Kind::Call) fail(K::Semantic, s.loc, "expression statement must be a call");
                gen_call(nullptr, *s.expr);
                return;
        }
    }

    void globals();
    void drop_jumps_to_next();
    Program layout(CompileResult& out);

    const Unit& unit_;
    MachineConfig cfg_;
    CompileOptions opt_;

    std::vector<SymIns> code_;
    std::vector<int> labels_;
    std::map<std::int64_t, int> const_index_;
    std::vector<std::int64_t> const_values_;
    std::set<std::int64_t> temps_in_use_;
    int max_temps_ = 0;
    int next_slot_ = 0;
    std::vector<std::int64_t> init_;  // initial values of variable slots

    std::vector<std::map<std::string, VarInfo>> scopes_;
    std::map<const Decl*, int> decl_slots_;
    std::map<const Function*, std::vector<int>> param_slots_;
    std::map<const Function*, int> ret_slots_;
    std::vector<SymbolInfo> symbols_;
    std::vector<std::pair<int, int>> loops_;  // break, continue labels
    const Function* fn_ = nullptr;
    int fn_end_ = -1;
    bool in_main_ = false;
    bool used_mul_ = false;
};

Operand::~Operand() {
    if (owner_) owner_->release(r_);
}

void Codegen::globals() {
    scopes_.emplace_back();
    for (const auto& g : unit_.globals) {
        if (unit_.find(g->name)) fail(K::Semantic, g->loc, "'" + g->name + "' is also a function");
        if (g->size > 0 && g->init.size() > static_cast<std::size_t>(g->size)) {
            fail(K::Semantic, g->loc, "too many initializers for '" + g->name + "'");
        }
        declare(*g, g->name);
        const int slot = scopes_.back().at(g->name).slot;
        init_.resize(static_cast<std::size_t>(next_slot_), 0);
        for (std::size_t k = 0; k < g->init.size(); ++k) {
            auto v = fold(*g->init[k]);
            if (!v) fail(K::Semantic, g->init[k]->loc, "global initializer must be a constant");
            init_[static_cast<std::size_t>(slot) + k] = *v;
        }
    }
}

// A JMP to the very next instruction is a no-op.
void Codegen::drop_jumps_to_next() {
    for (;;) {
        std::size_t i = 0;
        for (; i < code_.size(); ++i) {
            const auto& ins = code_[i];
            if (ins.op == Opcode::JMP && labels_[static_cast<std::size_t>(ins.c.v)] == static_cast<int>(i) + 1) break;
        }
        if (i == code_.size()) return;
        code_.erase(code_.begin() + static_cast<std::ptrdiff_t>(i));
        for (int& pos : labels_) {
            if (pos > static_cast<int>(i)) --pos;
        }
    }
}

Program Codegen::layout(CompileResult& out) {
    const int vars = next_slot_;
    const int consts = static_cast<int>(const_values_.size());
    const int temps = max_temps_;
    out.variable_slots = vars;
    out.constant_slots = consts;
    out.temp_slots = temps;
    const SourceLoc origin{1, 1};
    if (vars + consts + temps > cfg_.m) {
        fail(K::Capacity, origin, "data budget exceeded: " + std::to_string(vars) + " variables + " +
                                      std::to_string(consts) + " constants + " + std::to_string(temps) +
                                      " temporaries > m = " + std::to_string(cfg_.m));
    }
    if (static_cast<int>(code_.size()) > cfg_.instr_slots()) {
        fail(K::Capacity, origin, "instruction budget exceeded: " + std::to_string(code_.size()) + " > " +
                                      std::to_string(cfg_.instr_slots()));
    }
    Program p = Program::empty_for(cfg_);
    init_.resize(static_cast<std::size_t>(vars), 0);
    for (int i = 0; i < vars; ++i) p.memory[static_cast<std::size_t>(i)] = init_[static_cast<std::size_t>(i)];
    for (int i = 0; i < consts; ++i) p.memory[static_cast<std::size_t>(vars + i)] = const_values_[static_cast<std::size_t>(i)];

    auto col = [&](Ref r) -> int {
        switch (r.kind) {
            case Ref::Kind::None: return 0;
            case Ref::Kind::Mem: return cfg_.s + static_cast<int>(r.v);
            case Ref::Kind::Const: return cfg_.s + vars + static_cast<int>(r.v);
            case Ref::Kind::Temp: return cfg_.s + cfg_.m - 1 - static_cast<int>(r.v);
            case Ref::Kind::Label: return cfg_.instr_begin() + labels_[static_cast<std::size_t>(r.v)];
        }
        return 0;
    };
    for (const auto& ins : code_) p.code.push_back({static_cast<int>(ins.op), col(ins.b), col(ins.c)});
    return p;
}

CompileResult Codegen::run() {
    cfg_.validate();
    globals();
    const Function* main_fn = unit_.find("main");
    if (!main_fn) fail(K::Semantic, {1, 1}, "no main function");
    if (!main_fn->params.empty()) fail(K::Semantic, main_fn->loc, "main takes no parameters");
    std::set<std::string> seen;
    for (const auto& f : unit_.functions) {
        if (!seen.insert(f->name).second) fail(K::Semantic, f->loc, "redefinition of '" + f->name + "'");
        if (is_builtin(f->name)) fail(K::Semantic, f->loc, "'" + f->name + "' is a builtin");
    }
    in_main_ = true;
    scopes_.emplace_back();
    stmt(*main_fn->body);
    emit(Opcode::HALT);
    drop_jumps_to_next();

    CompileResult out;
    out.program = layout(out);
    out.symbols = symbols_;
    if (used_mul_) {
        out.warnings.push_back("mul is exact only when |a|*|b| < 2^" + std::to_string(cfg_.nbits) +
                               " and the result fits; -2^" + std::to_string(cfg_.nbits - 1) +
                               " has no magnitude");
    }
    return out;
}

}  // namespace

const SymbolInfo* CompileResult::symbol(const std::string& name) const {
    for (const auto& s : symbols) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

int CompileResult::slot(const std::string& name, int index) const {
    const SymbolInfo* s = symbol(name);
    if (!s) throw Error("no symbol '" + name + "'");
    if (index < 0 || index >= std::max(s->size, 1)) throw RangeError("index out of range for '" + name + "'");
    return s->slot + index;
}

CompileResult codegen(const Unit& unit, const MachineConfig& cfg, const CompileOptions& opt) {
    return Codegen(unit, cfg, opt).run();
}

CompileResult codegen_no_store(const Unit& unit, const MachineConfig& cfg) {
    CompileOptions opt;
    opt.use_store = false;
    return codegen(unit, cfg, opt);
}

CompileResult compile(const std::string& source, const MachineConfig& cfg, const CompileOptions& opt) {
    const Unit unit = parse_source(source);
    return codegen(unit, cfg, opt);
}

void write_compiled(std::ostream& out, const CompileResult& r) {
    write_program(out, r.program);
    for (const auto& s : r.symbols) out << "# sym " << s.name << " " << s.slot << " " << s.size << "\n";
}

std::vector<SymbolInfo> read_symbols(std::istream& in) {
    std::vector<SymbolInfo> out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string hash, tag;
        SymbolInfo s;
        if (ss >> hash >> tag >> s.name >> s.slot >> s.size && hash == "#" && tag == "sym") out.push_back(s);
    }
    return out;
}

}  // namespace loom
