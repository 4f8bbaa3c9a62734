/*
 * Copyright 2026 The plmu Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*!
  \file formula.hpp
  \brief Formulas of the probabilistic modal mu-calculus in positive form.

  Concrete syntax:

      formula := binder | or
      binder  := ("mu" | "nu") IDENT "." formula
      or      := and { "|" and }
      and     := modal { "&" modal }
      modal   := "<" IDENT ">" modal | "[" IDENT "]" modal | atom
      atom    := IDENT | "(" formula ")"

  Binders extend as far right as possible, `|` binds weaker than `&`, and
  modal prefixes bind tightest. `|` and `&` associate to the left.
*/

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plmu/error.hpp"

namespace plmu {

enum class Kind { Var, Diamond, Box, Or, And, Mu, Nu };

/// Immutable formula tree with value semantics; subtrees are shared.
class Formula {
public:
    static Formula var(std::string name) { return Formula(Kind::Var, std::move(name), {}, {}); }
    static Formula diamond(std::string label, Formula child)
    {
        return Formula(Kind::Diamond, std::move(label), std::move(child.node_), {});
    }
    static Formula box(std::string label, Formula child)
    {
        return Formula(Kind::Box, std::move(label), std::move(child.node_), {});
    }
    static Formula disj(Formula left, Formula right)
    {
        return Formula(Kind::Or, {}, std::move(left.node_), std::move(right.node_));
    }
    static Formula conj(Formula left, Formula right)
    {
        return Formula(Kind::And, {}, std::move(left.node_), std::move(right.node_));
    }
    static Formula mu(std::string name, Formula body)
    {
        return Formula(Kind::Mu, std::move(name), std::move(body.node_), {});
    }
    static Formula nu(std::string name, Formula body)
    {
        return Formula(Kind::Nu, std::move(name), std::move(body.node_), {});
    }
    static Formula binder(Kind kind, std::string name, Formula body)
    {
        return Formula(kind, std::move(name), std::move(body.node_), {});
    }
    static Formula modal(Kind kind, std::string label, Formula child)
    {
        return Formula(kind, std::move(label), std::move(child.node_), {});
    }
    static Formula binary(Kind kind, Formula left, Formula right)
    {
        return Formula(kind, {}, std::move(left.node_), std::move(right.node_));
    }

    Kind kind() const { return node_->kind; }

    bool is_var() const { return kind() == Kind::Var; }
    bool is_modal() const { return kind() == Kind::Diamond || kind() == Kind::Box; }
    bool is_binary() const { return kind() == Kind::Or || kind() == Kind::And; }
    bool is_binder() const { return kind() == Kind::Mu || kind() == Kind::Nu; }

    /// Variable name for Var, bound variable for Mu/Nu.
    const std::string& name() const { return node_->text; }
    /// Action label for Diamond/Box.
    const std::string& label() const { return node_->text; }

    /// Operand of a modality, or body of a binder.
    Formula child() const { return Formula(node_->left); }
    Formula body() const { return child(); }
    Formula left() const { return Formula(node_->left); }
    Formula right() const { return Formula(node_->right); }

    std::size_t size() const
    {
        std::size_t n = 1;
        if (node_->left) n += Formula(node_->left).size();
        if (node_->right) n += Formula(node_->right).size();
        return n;
    }

    friend bool operator==(const Formula& a, const Formula& b)
    {
        if (a.node_ == b.node_) return true;
        if (a.kind() != b.kind() || a.node_->text != b.node_->text) return false;
        switch (a.kind()) {
        case Kind::Var:
            return true;
        case Kind::Or:
        case Kind::And:
            return a.left() == b.left() && a.right() == b.right();
        default:
            return a.child() == b.child();
        }
    }

private:
    struct Node {
        Kind kind;
        std::string text;
        std::shared_ptr<const Node> left;
        std::shared_ptr<const Node> right;
    };

    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    Formula(Kind kind, std::string text, std::shared_ptr<const Node> left,
            std::shared_ptr<const Node> right)
        : node_(std::make_shared<const Node>(Node{kind, std::move(text), std::move(left),
                                                  std::move(right)}))
    {
    }

    std::shared_ptr<const Node> node_;
};

inline Kind dual(Kind k)
{
    switch (k) {
    case Kind::Diamond: return Kind::Box;
    case Kind::Box: return Kind::Diamond;
    case Kind::Or: return Kind::And;
    case Kind::And: return Kind::Or;
    case Kind::Mu: return Kind::Nu;
    case Kind::Nu: return Kind::Mu;
    case Kind::Var: break;
    }
    return k;
}

inline bool is_identifier(std::string_view s)
{
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return s != "mu" && s != "nu";
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline void print(std::ostream& os, const Formula& f);

inline void print_operand(std::ostream& os, const Formula& f, bool parens)
{
    if (parens) os << '(';
    print(os, f);
    if (parens) os << ')';
}

inline void print(std::ostream& os, const Formula& f)
{
    switch (f.kind()) {
    case Kind::Var:
        os << f.name();
        break;
    case Kind::Diamond:
    case Kind::Box: {
        os << (f.kind() == Kind::Diamond ? '<' : '[') << f.label()
           << (f.kind() == Kind::Diamond ? "> " : "] ");
        const Formula c = f.child();
        print_operand(os, c, c.is_binary() || c.is_binder());
        break;
    }
    case Kind::Or:
    case Kind::And: {
        const Formula l = f.left();
        const Formula r = f.right();
        // Left-associative: the right operand needs parentheses at equal precedence.
        const auto weaker = [&](const Formula& g, bool right) {
            if (g.is_binder()) return true;
            if (f.kind() == Kind::And && g.kind() == Kind::Or) return true;
            return right && g.kind() == f.kind();
        };
        print_operand(os, l, weaker(l, false));
        os << (f.kind() == Kind::Or ? " | " : " & ");
        print_operand(os, r, weaker(r, true));
        break;
    }
    case Kind::Mu:
    case Kind::Nu:
        os << (f.kind() == Kind::Mu ? "mu " : "nu ") << f.name() << ". ";
        print(os, f.body());
        break;
    }
}

} // namespace detail

inline std::ostream& operator<<(std::ostream& os, const Formula& f)
{
    detail::print(os, f);
    return os;
}

inline std::string to_string(const Formula& f)
{
    std::ostringstream os;
    detail::print(os, f);
    return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

enum class Tok { Ident, Mu, Nu, Dot, Lt, Gt, LBracket, RBracket, Bar, Amp, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view text)
{
    std::vector<Token> out;
    std::size_t line = 1, col = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
            continue;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            std::string word(text.substr(i, j - i));
            Tok kind = word == "mu" ? Tok::Mu : word == "nu" ? Tok::Nu : Tok::Ident;
            out.push_back({kind, std::move(word), line, col});
            col += j - i;
            i = j;
            continue;
        }
        Tok kind;
        switch (c) {
        case '.': kind = Tok::Dot; break;
        case '<': kind = Tok::Lt; break;
        case '>': kind = Tok::Gt; break;
        case '[': kind = Tok::LBracket; break;
        case ']': kind = Tok::RBracket; break;
        case '|': kind = Tok::Bar; break;
        case '&': kind = Tok::Amp; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        default:
            throw ParseError(std::string("unknown token '") + c + "'", line, col);
        }
        out.push_back({kind, std::string(1, c), line, col});
        ++col;
        ++i;
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

    Formula parse()
    {
        Formula f = formula();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after formula");
        return f;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError(what, peek().line, peek().column);
    }

    std::string expect_ident(const char* context)
    {
        if (peek().kind != Tok::Ident) {
            fail(std::string("expected identifier ") + context +
                 (peek().kind == Tok::End ? ", found end of input"
                                          : ", found '" + peek().text + "'"));
        }
        return advance().text;
    }

    void expect(Tok kind, const char* spelling)
    {
        if (peek().kind != kind) {
            fail(std::string("expected '") + spelling + "'" +
                 (peek().kind == Tok::End ? ", found end of input"
                                          : ", found '" + peek().text + "'"));
        }
        advance();
    }

    Formula formula()
    {
        if (peek().kind == Tok::Mu || peek().kind == Tok::Nu) {
            const Kind kind = advance().kind == Tok::Mu ? Kind::Mu : Kind::Nu;
            std::string name = expect_ident("after binder");
            expect(Tok::Dot, ".");
            return Formula::binder(kind, std::move(name), formula());
        }
        return disjunction();
    }

    Formula disjunction()
    {
        Formula f = conjunction();
        while (peek().kind == Tok::Bar) {
            advance();
            f = Formula::disj(std::move(f), conjunction());
        }
        return f;
    }

    Formula conjunction()
    {
        Formula f = modal();
        while (peek().kind == Tok::Amp) {
            advance();
            f = Formula::conj(std::move(f), modal());
        }
        return f;
    }

    Formula modal()
    {
        if (peek().kind == Tok::Lt) {
            advance();
            std::string label = expect_ident("as action label");
            expect(Tok::Gt, ">");
            return Formula::diamond(std::move(label), modal());
        }
        if (peek().kind == Tok::LBracket) {
            advance();
            std::string label = expect_ident("as action label");
            expect(Tok::RBracket, "]");
            return Formula::box(std::move(label), modal());
        }
        return atom();
    }

    Formula atom()
    {
        if (peek().kind == Tok::LParen) {
            advance();
            Formula f = formula();
            expect(Tok::RParen, ")");
            return f;
        }
        if (peek().kind == Tok::Mu || peek().kind == Tok::Nu)
            fail("binder must be parenthesized here");
        return Formula::var(expect_ident("or '('"));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses the concrete syntax above. Throws ParseError with line/column.
inline Formula parse(std::string_view text) { return detail::Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Variables

namespace detail {

inline void collect_free(const Formula& f, std::multiset<std::string>& bound,
                         std::set<std::string>& out)
{
    switch (f.kind()) {
    case Kind::Var:
        if (!bound.count(f.name())) out.insert(f.name());
        break;
    case Kind::Or:
    case Kind::And:
        collect_free(f.left(), bound, out);
        collect_free(f.right(), bound, out);
        break;
    case Kind::Mu:
    case Kind::Nu: {
        auto it = bound.insert(f.name());
        collect_free(f.body(), bound, out);
        bound.erase(it);
        break;
    }
    default:
        collect_free(f.child(), bound, out);
    }
}

inline void collect_names(const Formula& f, std::set<std::string>& out)
{
    if (f.is_var() || f.is_binder()) out.insert(f.name());
    if (f.is_binary()) {
        collect_names(f.left(), out);
        collect_names(f.right(), out);
    } else if (!f.is_var()) {
        collect_names(f.child(), out);
    }
}

} // namespace detail

inline std::set<std::string> free_vars(const Formula& f)
{
    std::multiset<std::string> bound;
    std::set<std::string> out;
    detail::collect_free(f, bound, out);
    return out;
}

inline bool is_closed(const Formula& f) { return free_vars(f).empty(); }

/// Every binder binds a distinct variable and no variable is both free and bound.
inline bool is_normal_form(const Formula& f)
{
    std::set<std::string> binders;
    bool ok = true;
    auto walk = [&](auto&& self, const Formula& g) -> void {
        if (!ok) return;
        if (g.is_binder() && !binders.insert(g.name()).second) ok = false;
        if (g.is_binary()) {
            self(self, g.left());
            self(self, g.right());
        } else if (!g.is_var()) {
            self(self, g.child());
        }
    };
    walk(walk, f);
    if (!ok) return false;
    for (const auto& x : free_vars(f))
        if (binders.count(x)) return false;
    return true;
}

/// Alpha-renames bound variables into normal form. Clashing binders get the
/// smallest numeric suffix that does not occur anywhere in the formula.
inline Formula normalize(const Formula& f)
{
    std::set<std::string> taken = free_vars(f);
    std::set<std::string> avoid;
    detail::collect_names(f, avoid);

    auto fresh = [&](const std::string& base) {
        for (std::size_t k = 1;; ++k) {
            std::string candidate = base + std::to_string(k);
            if (!avoid.count(candidate) && !taken.count(candidate)) return candidate;
        }
    };

    std::map<std::string, std::vector<std::string>> scope;
    auto rec = [&](auto&& self, const Formula& g) -> Formula {
        switch (g.kind()) {
        case Kind::Var: {
            auto it = scope.find(g.name());
            if (it == scope.end() || it->second.empty()) return g;
            return it->second.back() == g.name() ? g : Formula::var(it->second.back());
        }
        case Kind::Or:
        case Kind::And: {
            Formula l = self(self, g.left());
            Formula r = self(self, g.right());
            if (l == g.left() && r == g.right()) return g;
            return Formula::binary(g.kind(), std::move(l), std::move(r));
        }
        case Kind::Mu:
        case Kind::Nu: {
            std::string name = taken.count(g.name()) ? fresh(g.name()) : g.name();
            taken.insert(name);
            scope[g.name()].push_back(name);
            Formula body = self(self, g.body());
            scope[g.name()].pop_back();
            if (name == g.name() && body == g.body()) return g;
            return Formula::binder(g.kind(), std::move(name), std::move(body));
        }
        default: {
            Formula c = self(self, g.child());
            if (c == g.child()) return g;
            return Formula::modal(g.kind(), g.label(), std::move(c));
        }
        }
    };
    return rec(rec, f);
}

/// Structural equality up to consistent renaming of bound variables.
inline bool alpha_equivalent(const Formula& a, const Formula& b)
{
    std::vector<std::pair<std::string, std::string>> env;
    auto rec = [&](auto&& self, const Formula& x, const Formula& y) -> bool {
        if (x.kind() != y.kind()) return false;
        switch (x.kind()) {
        case Kind::Var:
            for (auto it = env.rbegin(); it != env.rend(); ++it) {
                const bool lx = it->first == x.name();
                const bool ly = it->second == y.name();
                if (lx || ly) return lx && ly;
            }
            return x.name() == y.name();
        case Kind::Or:
        case Kind::And:
            return self(self, x.left(), y.left()) && self(self, x.right(), y.right());
        case Kind::Mu:
        case Kind::Nu: {
            env.emplace_back(x.name(), y.name());
            const bool ok = self(self, x.body(), y.body());
            env.pop_back();
            return ok;
        }
        default:
            return x.label() == y.label() && self(self, x.child(), y.child());
        }
    };
    return rec(rec, a, b);
}

/// Dual formula of a closed formula: semantically 1 - f.
inline Formula negate(const Formula& f)
{
    if (!is_closed(f)) throw FormulaError("negation is only defined on closed formulas: " + to_string(f));
    auto rec = [](auto&& self, const Formula& g) -> Formula {
        switch (g.kind()) {
        case Kind::Var:
            return g;
        case Kind::Or:
        case Kind::And:
            return Formula::binary(dual(g.kind()), self(self, g.left()), self(self, g.right()));
        case Kind::Mu:
        case Kind::Nu:
            return Formula::binder(dual(g.kind()), g.name(), self(self, g.body()));
        default:
            return Formula::modal(dual(g.kind()), g.label(), self(self, g.child()));
        }
    };
    return rec(rec, f);
}

/// Number of mu/nu binders.
inline std::size_t binder_count(const Formula& f)
{
    std::size_t n = f.is_binder() ? 1 : 0;
    if (f.is_binary()) return n + binder_count(f.left()) + binder_count(f.right());
    if (!f.is_var()) n += binder_count(f.child());
    return n;
}

/// Length of the longest root-to-leaf path, counting nodes.
inline std::size_t depth(const Formula& f)
{
    if (f.is_var()) return 1;
    if (f.is_binary()) return 1 + std::max(depth(f.left()), depth(f.right()));
    return 1 + depth(f.child());
}

} // namespace plmu
