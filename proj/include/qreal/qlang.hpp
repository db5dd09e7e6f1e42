// Copyright 2026 The qreal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Statement language about observable values.
//
// Concrete syntax (whitespace between tokens is insignificant):
//
//   formula  = iff ;
//   iff      = impl , { "<->" , impl } ;
//   impl     = or , [ "->" , impl ] ;
//   or       = and , { "|" , and } ;
//   and      = unary , { "&" , unary } ;
//   unary    = "~" , unary | primary ;
//   primary  = atom | equal | com | "(" , formula , ")" ;
//   atom     = ident , "in" , "{" , number , { "," , number } , "}" ;
//   equal    = "[" , ident , "=" , ident , "]" ;
//   com      = "com" , "(" , ident , { "," , ident } , ")" ;
//
// "in" and "com" are reserved words. "->" denotes the Sasaki hook.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "qreal/errors.hpp"

namespace qreal {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Atom {
    std::string observable;
    std::vector<double> values;  // sorted, distinct
};

struct Not {
    FormulaPtr operand;
};

enum class BinaryOp { And, Or, Sasaki, Iff };

struct Binary {
    BinaryOp op;
    FormulaPtr lhs;
    FormulaPtr rhs;
};

struct Equal {
    std::string lhs;
    std::string rhs;
};

struct Com {
    std::vector<std::string> observables;  // at least two
};

struct Formula {
    std::variant<Atom, Not, Binary, Equal, Com> node;
};

inline bool operator==(const Formula &a, const Formula &b);

inline bool operator==(const Atom &a, const Atom &b) {
    return a.observable == b.observable && a.values == b.values;
}
inline bool operator==(const Not &a, const Not &b) {
    return *a.operand == *b.operand;
}
inline bool operator==(const Binary &a, const Binary &b) {
    return a.op == b.op && *a.lhs == *b.lhs && *a.rhs == *b.rhs;
}
inline bool operator==(const Equal &a, const Equal &b) {
    return a.lhs == b.lhs && a.rhs == b.rhs;
}
inline bool operator==(const Com &a, const Com &b) {
    return a.observables == b.observables;
}
inline bool operator==(const Formula &a, const Formula &b) {
    return a.node == b.node;
}

inline bool is_identifier(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) {
        return false;
    }
    if (s == "in" || s == "com") {
        return false;
    }
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// ---------------------------------------------------------------------------
// Builders. These validate identifiers and value sets.

namespace detail {

inline void require_identifier(const std::string &name) {
    if (!is_identifier(name)) {
        throw Error(ErrorKind::InvalidArgument, "'" + name + "' is not a valid observable name");
    }
}

}  // namespace detail

inline FormulaPtr make_atom(std::string observable, std::vector<double> values) {
    detail::require_identifier(observable);
    if (values.empty()) {
        throw Error(ErrorKind::InvalidArgument, "atom value set must be nonempty");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::InvalidArgument, "atom values must be finite");
        }
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return std::make_shared<const Formula>(Formula{Atom{std::move(observable), std::move(values)}});
}

inline FormulaPtr make_not(FormulaPtr operand) {
    return std::make_shared<const Formula>(Formula{Not{std::move(operand)}});
}

inline FormulaPtr make_binary(BinaryOp op, FormulaPtr lhs, FormulaPtr rhs) {
    return std::make_shared<const Formula>(Formula{Binary{op, std::move(lhs), std::move(rhs)}});
}

inline FormulaPtr make_and(FormulaPtr l, FormulaPtr r) {
    return make_binary(BinaryOp::And, std::move(l), std::move(r));
}
inline FormulaPtr make_or(FormulaPtr l, FormulaPtr r) {
    return make_binary(BinaryOp::Or, std::move(l), std::move(r));
}
inline FormulaPtr make_sasaki(FormulaPtr l, FormulaPtr r) {
    return make_binary(BinaryOp::Sasaki, std::move(l), std::move(r));
}
inline FormulaPtr make_iff(FormulaPtr l, FormulaPtr r) {
    return make_binary(BinaryOp::Iff, std::move(l), std::move(r));
}

inline FormulaPtr make_equal(std::string lhs, std::string rhs) {
    detail::require_identifier(lhs);
    detail::require_identifier(rhs);
    return std::make_shared<const Formula>(Formula{Equal{std::move(lhs), std::move(rhs)}});
}

inline FormulaPtr make_com(std::vector<std::string> observables) {
    if (observables.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, "com needs at least two observables");
    }
    for (const auto &o : observables) {
        detail::require_identifier(o);
    }
    return std::make_shared<const Formula>(Formula{Com{std::move(observables)}});
}

// ---------------------------------------------------------------------------
// Parsing

class ParseError : public Error {
   public:
    ParseError(std::size_t byte_offset, std::string expected, std::string found)
        : Error(ErrorKind::Parse, "at offset " + std::to_string(byte_offset) + ": expected " + expected + ", found " +
                                      found),
          byte_offset_(byte_offset),
          expected_(std::move(expected)),
          found_(std::move(found)) {
    }

    std::size_t byte_offset() const noexcept {
        return byte_offset_;
    }
    const std::string &expected() const noexcept {
        return expected_;
    }
    const std::string &found() const noexcept {
        return found_;
    }

   private:
    std::size_t byte_offset_;
    std::string expected_;
    std::string found_;
};

namespace detail {

enum class Tok {
    Ident,
    Number,
    KwIn,
    KwCom,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    End,
    Invalid,
};

struct Token {
    Tok kind;
    std::size_t offset;
    std::string_view text;
};

class Lexer {
   public:
    explicit Lexer(std::string_view src) : src_(src) {
    }

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) {
            return {Tok::End, start, {}};
        }
        const char c = src_[pos_];
        auto single = [&](Tok kind) {
            ++pos_;
            return Token{kind, start, src_.substr(start, 1)};
        };
        switch (c) {
            case '{':
                return single(Tok::LBrace);
            case '}':
                return single(Tok::RBrace);
            case '(':
                return single(Tok::LParen);
            case ')':
                return single(Tok::RParen);
            case '[':
                return single(Tok::LBracket);
            case ']':
                return single(Tok::RBracket);
            case ',':
                return single(Tok::Comma);
            case '=':
                return single(Tok::Equals);
            case '~':
                return single(Tok::Tilde);
            case '&':
                return single(Tok::Amp);
            case '|':
                return single(Tok::Bar);
            default:
                break;
        }
        if (c == '-' && peek_char(1) == '>') {
            pos_ += 2;
            return {Tok::Arrow, start, src_.substr(start, 2)};
        }
        if (c == '<' && peek_char(1) == '-' && peek_char(2) == '>') {
            pos_ += 3;
            return {Tok::DoubleArrow, start, src_.substr(start, 3)};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(peek_char(1))))) {
            return lex_number(start);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view word = src_.substr(start, pos_ - start);
            if (word == "in") {
                return {Tok::KwIn, start, word};
            }
            if (word == "com") {
                return {Tok::KwCom, start, word};
            }
            return {Tok::Ident, start, word};
        }
        // One UTF-8 sequence (or byte) as the offending text.
        std::size_t len = 1;
        const auto uc = static_cast<unsigned char>(c);
        if (uc >= 0xF0) {
            len = 4;
        } else if (uc >= 0xE0) {
            len = 3;
        } else if (uc >= 0xC0) {
            len = 2;
        }
        len = std::min(len, src_.size() - start);
        pos_ += len;
        return {Tok::Invalid, start, src_.substr(start, len)};
    }

   private:
    char peek_char(std::size_t ahead) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    Token lex_number(std::size_t start) {
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            }
        };
        if (src_[pos_] == '-' || src_[pos_] == '+') {
            ++pos_;
        }
        digits();
        if (peek_char(0) == '.' && std::isdigit(static_cast<unsigned char>(peek_char(1)))) {
            ++pos_;
            digits();
        }
        if (peek_char(0) == 'e' || peek_char(0) == 'E') {
            const char sign = peek_char(1);
            const std::size_t skip = (sign == '+' || sign == '-') ? 2 : 1;
            if (std::isdigit(static_cast<unsigned char>(peek_char(skip)))) {
                pos_ += skip;
                digits();
            }
        }
        return {Tok::Number, start, src_.substr(start, pos_ - start)};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
   public:
    explicit Parser(std::string_view src) : lexer_(src) {
        advance();
    }

    FormulaPtr parse_all() {
        FormulaPtr f = parse_iff();
        if (tok_.kind != Tok::End) {
            fail("end of input");
        }
        return f;
    }

   private:
    void advance() {
        tok_ = lexer_.next();
    }

    [[noreturn]] void fail(const std::string &expected) const {
        std::string found;
        if (tok_.kind == Tok::End) {
            found = "end of input";
        } else {
            found = "'" + std::string(tok_.text) + "'";
        }
        throw ParseError(tok_.offset, expected, found);
    }

    void expect(Tok kind, const char *what) {
        if (tok_.kind != kind) {
            fail(what);
        }
        advance();
    }

    std::string expect_identifier() {
        if (tok_.kind != Tok::Ident) {
            fail("observable name");
        }
        std::string name(tok_.text);
        advance();
        return name;
    }

    double expect_number() {
        if (tok_.kind != Tok::Number) {
            fail("number");
        }
        std::string_view text = tok_.text;
        if (!text.empty() && text.front() == '+') {
            text.remove_prefix(1);
        }
        double value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
            fail("finite number");
        }
        advance();
        return value;
    }

    FormulaPtr parse_iff() {
        FormulaPtr lhs = parse_impl();
        while (tok_.kind == Tok::DoubleArrow) {
            advance();
            lhs = make_iff(std::move(lhs), parse_impl());
        }
        return lhs;
    }

    FormulaPtr parse_impl() {
        FormulaPtr lhs = parse_or();
        if (tok_.kind == Tok::Arrow) {
            advance();
            return make_sasaki(std::move(lhs), parse_impl());
        }
        return lhs;
    }

    FormulaPtr parse_or() {
        FormulaPtr lhs = parse_and();
        while (tok_.kind == Tok::Bar) {
            advance();
            lhs = make_or(std::move(lhs), parse_and());
        }
        return lhs;
    }

    FormulaPtr parse_and() {
        FormulaPtr lhs = parse_unary();
        while (tok_.kind == Tok::Amp) {
            advance();
            lhs = make_and(std::move(lhs), parse_unary());
        }
        return lhs;
    }

    FormulaPtr parse_unary() {
        if (tok_.kind == Tok::Tilde) {
            advance();
            return make_not(parse_unary());
        }
        return parse_primary();
    }

    FormulaPtr parse_primary() {
        switch (tok_.kind) {
            case Tok::Ident: {
                std::string name = expect_identifier();
                expect(Tok::KwIn, "'in'");
                expect(Tok::LBrace, "'{'");
                std::vector<double> values{expect_number()};
                while (tok_.kind == Tok::Comma) {
                    advance();
                    values.push_back(expect_number());
                }
                expect(Tok::RBrace, "',' or '}'");
                return make_atom(std::move(name), std::move(values));
            }
            case Tok::LBracket: {
                advance();
                std::string lhs = expect_identifier();
                expect(Tok::Equals, "'='");
                std::string rhs = expect_identifier();
                expect(Tok::RBracket, "']'");
                return make_equal(std::move(lhs), std::move(rhs));
            }
            case Tok::KwCom: {
                advance();
                expect(Tok::LParen, "'('");
                std::vector<std::string> names{expect_identifier()};
                while (tok_.kind == Tok::Comma) {
                    advance();
                    names.push_back(expect_identifier());
                }
                if (names.size() < 2) {
                    fail("','");
                }
                expect(Tok::RParen, "',' or ')'");
                return make_com(std::move(names));
            }
            case Tok::LParen: {
                advance();
                FormulaPtr inner = parse_iff();
                expect(Tok::RParen, "')'");
                return inner;
            }
            default:
                fail("formula");
        }
    }

    Lexer lexer_;
    Token tok_{Tok::End, 0, {}};
};

}  // namespace detail

/// Parses one formula; throws ParseError at the first offending token.
inline FormulaPtr parse(std::string_view text) {
    return detail::Parser(text).parse_all();
}

// ---------------------------------------------------------------------------
// Printing

/// Shortest decimal that reads back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace detail {

inline int precedence(const Formula &f) {
    if (const auto *b = std::get_if<Binary>(&f.node)) {
        switch (b->op) {
            case BinaryOp::Iff:
                return 1;
            case BinaryOp::Sasaki:
                return 2;
            case BinaryOp::Or:
                return 3;
            case BinaryOp::And:
                return 4;
        }
    }
    if (std::holds_alternative<Not>(f.node)) {
        return 5;
    }
    return 6;
}

inline std::string_view op_symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::And:
            return "&";
        case BinaryOp::Or:
            return "|";
        case BinaryOp::Sasaki:
            return "->";
        case BinaryOp::Iff:
            return "<->";
    }
    return "?";
}

inline void print_to(const Formula &f, std::string &out);

inline void print_operand(const Formula &f, bool parenthesize, std::string &out) {
    if (parenthesize) {
        out += '(';
    }
    print_to(f, out);
    if (parenthesize) {
        out += ')';
    }
}

inline void print_to(const Formula &f, std::string &out) {
    std::visit(
        [&](const auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Atom>) {
                out += n.observable;
                out += " in {";
                for (std::size_t i = 0; i < n.values.size(); ++i) {
                    if (i > 0) {
                        out += ", ";
                    }
                    out += format_number(n.values[i]);
                }
                out += '}';
            } else if constexpr (std::is_same_v<T, Not>) {
                out += '~';
                print_operand(*n.operand, precedence(*n.operand) < 5, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const int level = precedence(f);
                const bool right_assoc = n.op == BinaryOp::Sasaki;
                const int lp = precedence(*n.lhs);
                const int rp = precedence(*n.rhs);
                print_operand(*n.lhs, right_assoc ? lp <= level : lp < level, out);
                out += ' ';
                out += op_symbol(n.op);
                out += ' ';
                print_operand(*n.rhs, right_assoc ? rp < level : rp <= level, out);
            } else if constexpr (std::is_same_v<T, Equal>) {
                out += '[';
                out += n.lhs;
                out += " = ";
                out += n.rhs;
                out += ']';
            } else {
                out += "com(";
                for (std::size_t i = 0; i < n.observables.size(); ++i) {
                    if (i > 0) {
                        out += ", ";
                    }
                    out += n.observables[i];
                }
                out += ')';
            }
        },
        f.node);
}

}  // namespace detail

/// Canonical text with the fewest parentheses the precedence table allows.
inline std::string print(const Formula &f) {
    std::string out;
    detail::print_to(f, out);
    return out;
}

/// Observable names referenced by a formula, in first-occurrence order.
inline std::vector<std::string> referenced_observables(const Formula &f) {
    std::vector<std::string> names;
    auto add = [&](const std::string &n) {
        if (std::find(names.begin(), names.end(), n) == names.end()) {
            names.push_back(n);
        }
    };
    auto walk = [&](auto &self, const Formula &g) -> void {
        std::visit(
            [&](const auto &n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Atom>) {
                    add(n.observable);
                } else if constexpr (std::is_same_v<T, Not>) {
                    self(self, *n.operand);
                } else if constexpr (std::is_same_v<T, Binary>) {
                    self(self, *n.lhs);
                    self(self, *n.rhs);
                } else if constexpr (std::is_same_v<T, Equal>) {
                    add(n.lhs);
                    add(n.rhs);
                } else {
                    for (const auto &o : n.observables) {
                        add(o);
                    }
                }
            },
            g.node);
    };
    walk(walk, f);
    return names;
}

}  // namespace qreal
