// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <initializer_list>

#include "loom/ast.hpp"

namespace loom {

namespace {

class Parser {
public:
    explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

    Unit unit() {
        Unit u;
        while (peek().kind != Tok::End) {
            const bool is_void = peek().text == "void";
            if (!is_void && !is_kw("int")) fail("expected declaration or function");
            next();
            const Token name = expect_ident();
            if (at("(")) {
                u.functions.push_back(function(name, !is_void));
                continue;
            }
            if (is_void) fail("variables cannot be void");
            declarators(name, [&](std::unique_ptr<Decl> d) { u.globals.push_back(std::move(d)); });
        }
        return u;
    }

private:
    const Token& peek(std::size_t k = 0) const {
        const std::size_t i = std::min(pos_ + k, toks_.size() - 1);
        return toks_[i];
    }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool at(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
    bool is_kw(const char* k) const { return peek().kind == Tok::Keyword && peek().text == k; }
    bool accept(const char* p) {
        if (!at(p)) return false;
        next();
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw CompileError(CompileError::Kind::Parse, t.loc, msg + " before " + found);
    }
    void expect(const char* p) {
        if (!accept(p)) fail(std::string("expected '") + p + "'");
    }
    Token expect_ident() {
        if (peek().kind != Tok::Ident) fail("expected identifier");
        return next();
    }

    template <typename Sink>
    void declarators(Token name, Sink&& sink) {
        for (;;) {
            auto d = std::make_unique<Decl>();
            d->name = name.text;
            d->loc = name.loc;
            if (accept("[")) {
                if (peek().kind != Tok::Int) fail("array size must be an integer literal");
                d->size = static_cast<int>(next().value);
                if (d->size <= 0) fail("array size must be positive");
                expect("]");
            }
            if (accept("=")) {
                if (d->size > 0) {
                    expect("{");
                    if (!at("}")) {
                        do d->init.push_back(expr());
                        while (accept(","));
                    }
                    expect("}");
                } else {
                    d->init.push_back(expr());
                }
            }
            sink(std::move(d));
            if (!accept(",")) break;
            name = expect_ident();
        }
        expect(";");
    }

    std::unique_ptr<Function> function(const Token& name, bool returns_value) {
        auto f = std::make_unique<Function>();
        f->name = name.text;
        f->loc = name.loc;
        f->returns_value = returns_value;
        expect("(");
        if (is_kw("void") && peek(1).text == ")") next();
        if (!at(")")) {
            do {
                if (!is_kw("int")) fail("expected 'int' parameter");
                next();
                f->params.push_back(expect_ident().text);
            } while (accept(","));
        }
        expect(")");
        if (!at("{")) fail("expected function body");
        f->body = statement();
        return f;
    }

    StmtPtr make(Stmt::Kind k, SourceLoc loc) {
        auto s = std::make_unique<Stmt>();
        s->kind = k;
        s->loc = loc;
        return s;
    }

    StmtPtr block() {
        auto b = make(Stmt::Kind::Block, peek().loc);
        expect("{");
        while (!at("}")) {
            if (peek().kind == Tok::End) fail("expected '}'");
            if (is_kw("int")) {
                next();
                declarators(expect_ident(), [&](std::unique_ptr<Decl> d) {
                    auto s = make(Stmt::Kind::Decl, d->loc);
                    s->decl = std::move(d);
                    b->body.push_back(std::move(s));
                });
                continue;
            }
            b->body.push_back(statement());
        }
        expect("}");
        return b;
    }

    StmtPtr statement() {
        const SourceLoc loc = peek().loc;
        if (at("{")) return block();
        if (is_kw("int")) fail("declaration not allowed here");
        if (is_kw("if")) {
            next();
            auto s = make(Stmt::Kind::If, loc);
            expect("(");
            s->expr = expr();
            expect(")");
            s->body.push_back(statement());
            if (is_kw("else")) {
                next();
                s->body.push_back(statement());
            }
            return s;
        }
        if (is_kw("while")) {
            next();
            auto s = make(Stmt::Kind::While, loc);
            expect("(");
            s->expr = expr();
            expect(")");
            s->body.push_back(statement());
            return s;
        }
        if (is_kw("for")) {
            next();
            auto s = make(Stmt::Kind::For, loc);
            expect("(");
            if (at(";")) fail("for loop requires an initializer");
            s->init = simple();
            expect(";");
            if (at(";")) fail("for loop requires a condition");
            s->expr = expr();
            expect(";");
            if (at(")")) fail("for loop requires a step");
            s->step = simple();
            expect(")");
            s->body.push_back(statement());
            return s;
        }
        if (is_kw("break") || is_kw("continue")) {
            auto s = make(is_kw("break") ? Stmt::Kind::Break : Stmt::Kind::Continue, loc);
            next();
            expect(";");
            return s;
        }
        if (is_kw("return")) {
            next();
            auto s = make(Stmt::Kind::Return, loc);
            if (!at(";")) s->expr = expr();
            expect(";");
            return s;
        }
        if (accept(";")) return make(Stmt::Kind::Block, loc);
        auto s = simple();
        expect(";");
        return s;
    }

    // Assignment, increment, or call statement (also used in for headers).
    StmtPtr simple() {
        const SourceLoc loc = peek().loc;
        if (is_kw("int")) {
            next();
            const Token name = expect_ident();
            auto s = make(Stmt::Kind::Decl, loc);
            s->decl = std::make_unique<Decl>();
            s->decl->name = name.text;
            s->decl->loc = name.loc;
            expect("=");
            s->decl->init.push_back(expr());
            return s;
        }
        if (at("++") || at("--")) {
            auto s = make(Stmt::Kind::IncDec, loc);
            s->op = next().text;
            s->target = lvalue();
            return s;
        }
        if (peek().kind != Tok::Ident) fail("expected statement");
        if (peek(1).text == "(") {
            auto s = make(Stmt::Kind::Expr, loc);
            s->expr = postfix();
            return s;
        }
        auto target = lvalue();
        if (at("++") || at("--")) {
            auto s = make(Stmt::Kind::IncDec, loc);
            s->op = next().text;
            s->target = std::move(target);
            return s;
        }
        for (const char* op : {"=", "+=", "-=", "*=", "&=", "|=", "^=", "<<=", ">>="}) {
            if (at(op)) {
                auto s = make(Stmt::Kind::Assign, loc);
                s->op = next().text;
                s->target = std::move(target);
                s->expr = expr();
                return s;
            }
        }
        fail("expected assignment");
    }

    ExprPtr lvalue() {
        if (peek().kind != Tok::Ident) fail("expected variable");
        auto e = postfix();
        if (e->kind != Expr::Kind::Var && e->kind != Expr::Kind::Index) fail("expected assignable expression");
        return e;
    }

    ExprPtr binary_node(std::string op, ExprPtr l, ExprPtr r, SourceLoc loc) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Binary;
        e->op = std::move(op);
        e->loc = loc;
        e->args.push_back(std::move(l));
        e->args.push_back(std::move(r));
        return e;
    }

    // Precedence levels, loosest first.
    ExprPtr expr() { return level(0); }

    ExprPtr level(int k) {
        static const std::vector<std::vector<const char*>> kLevels = {
            {"||"}, {"&&"}, {"|"}, {"^"}, {"&"}, {"==", "!="}, {"<", "<=", ">", ">="}, {"<<", ">>"}, {"+", "-"}, {"*"}};
        if (k == static_cast<int>(kLevels.size())) return unary();
        auto lhs = level(k + 1);
        for (;;) {
            const char* hit = nullptr;
            for (const char* op : kLevels[static_cast<std::size_t>(k)]) {
                if (at(op)) hit = op;
            }
            if (!hit) return lhs;
            const SourceLoc loc = next().loc;
            lhs = binary_node(hit, std::move(lhs), level(k + 1), loc);
        }
    }

    ExprPtr unary() {
        if (at("-") || at("!") || at("~")) {
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->loc = peek().loc;
            e->op = next().text;
            e->args.push_back(unary());
            return e;
        }
        return postfix();
    }

    ExprPtr postfix() {
        auto e = std::make_unique<Expr>();
        e->loc = peek().loc;
        if (peek().kind == Tok::Int) {
            e->kind = Expr::Kind::Int;
            e->value = next().value;
            return e;
        }
        if (accept("(")) {
            auto inner = expr();
            expect(")");
            return inner;
        }
        if (peek().kind != Tok::Ident) fail("expected expression");
        e->name = next().text;
        if (accept("(")) {
            e->kind = Expr::Kind::Call;
            if (!at(")")) {
                do e->args.push_back(expr());
                while (accept(","));
            }
            expect(")");
            return e;
        }
        if (accept("[")) {
            e->kind = Expr::Kind::Index;
            e->args.push_back(expr());
            expect("]");
            return e;
        }
        e->kind = Expr::Kind::Var;
        return e;
    }

    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
};

}  // namespace

const Function* Unit::find(const std::string& name) const {
    for (const auto& f : functions) {
        if (f->name == name) return f.get();
    }
    return nullptr;
}

bool is_builtin(const std::string& name) {
    return name == "abs" || name == "min" || name == "max" || name == "mul" || name == "swap";
}

Unit parse(const std::vector<Token>& tokens) {
    if (tokens.empty() || tokens.back().kind != Tok::End) throw Error("token stream must end with End");
    return Parser(tokens).unit();
}

Unit parse_source(const std::string& source) { return parse(lex(source)); }

}  // namespace loom
