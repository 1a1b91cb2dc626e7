// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <cctype>
#include <string_view>

#include "loom/ast.hpp"

namespace loom {

namespace {

constexpr std::array<std::string_view, 9> kKeywords = {"int",    "void",  "if",       "else", "while",
                                                        "for",    "break", "continue", "return"};

// Longest first so greedy matching works.
constexpr std::array<std::string_view, 37> kPuncts = {
    "<<=", ">>=", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "&=", "|=", "^=", "++", "--",
    "+",   "-",   "*",  "&",  "|",  "^",  "~",  "!",  "<",  ">",  "=",  "(",  ")",  "[",  "]",  "{",  "}",  ",", ";"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::string format_diagnostic(const std::string& file, const CompileError& e) {
    return file + ":" + std::to_string(e.loc().line) + ":" + std::to_string(e.loc().col) + ": error: " + e.what();
}

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    SourceLoc loc;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (; k > 0 && i < src.size(); --k, ++i) {
            if (src[i] == '\n') {
                ++loc.line;
                loc.col = 1;
            } else {
                ++loc.col;
            }
        }
    };
    auto fail = [](SourceLoc at, const std::string& msg) { throw CompileError(CompileError::Kind::Lex, at, msg); };

    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (src.compare(i, 2, "//") == 0) {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (src.compare(i, 2, "/*") == 0) {
            const SourceLoc start = loc;
            const auto end = src.find("*/", i + 2);
            if (end == std::string::npos) fail(start, "unterminated comment");
            advance(end + 2 - i);
            continue;
        }
        Token t;
        t.loc = loc;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            t.text = src.substr(i, j - i);
            t.kind = Tok::Ident;
            for (auto kw : kKeywords) {
                if (t.text == kw) t.kind = Tok::Keyword;
            }
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            int base = 10;
            if (c == '0' && i + 1 < src.size() && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
                base = 16;
                j += 2;
            }
            const std::size_t digits = j;
            std::int64_t v = 0;
            while (j < src.size() && std::isxdigit(static_cast<unsigned char>(src[j]))) {
                const char d = static_cast<char>(std::tolower(static_cast<unsigned char>(src[j])));
                const int dv = std::isdigit(static_cast<unsigned char>(d)) ? d - '0' : d - 'a' + 10;
                if (dv >= base) break;
                v = v * base + dv;
                if (v > (std::int64_t{1} << 31)) fail(t.loc, "integer literal too large");
                ++j;
            }
            if (j == digits || (j < src.size() && ident_char(src[j]))) {
                fail(t.loc, "malformed integer literal");
            }
            t.kind = Tok::Int;
            t.text = src.substr(i, j - i);
            t.value = v;
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        bool matched = false;
        for (auto p : kPuncts) {
            if (src.compare(i, p.size(), p) == 0) {
                t.kind = Tok::Punct;
                t.text = std::string(p);
                advance(p.size());
                out.push_back(std::move(t));
                matched = true;
                break;
            }
        }
        if (!matched) fail(loc, std::string("unexpected character '") + c + "'");
    }
    Token end;
    end.loc = loc;
    out.push_back(end);
    return out;
}

}  // namespace loom
