#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hahn/base.hpp"
#include "hahn/scalar.hpp"

// Piecewise expression mini-language used for closed-form sequences and
// matrices:
//
//   piece(k==1, 1/l) piece(true, 0)
//   piece(k<=m and l<=n, 1/(m*n)) piece(true, 0)
//   1/(k*l)^2
//
// Literals are integers (rationals arise from division), variables are k,l
// for sequences and m,n,k,l for matrices, operators are + - * / ^ with the
// usual precedence, and conditions are comparisons chained with `and` / `or`
// (`and` binds tighter). A bare expression is its own default piece; a piece
// list must end with piece(true, ...). `^` accepts nonnegative integer
// exponents only, so rational inputs stay rational.

namespace hahn::expr {

enum class VarSet { sequence, matrix };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { constant, variable, add, sub, mul, div, pow, neg };
    Kind kind;
    Rational value;  // constant
    char var = 0;    // variable
    NodePtr lhs, rhs;
};

struct Cond;
using CondPtr = std::shared_ptr<const Cond>;

struct Cond {
    enum class Kind { always, cmp, conj, disj };
    enum class Op { eq, le, lt, ge, gt };
    Kind kind;
    Op op = Op::eq;
    NodePtr lhs, rhs;  // cmp
    CondPtr a, b;      // conj/disj
};

struct Piece {
    CondPtr cond;
    NodePtr value;
};

struct Piecewise {
    std::vector<Piece> pieces;  // last piece has cond->kind == always
    VarSet vars = VarSet::sequence;
};

// ---------------------------------------------------------------------------
// construction helpers (used by tests and the support analyzer)

inline NodePtr constant(Rational v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::constant;
    n->value = std::move(v);
    return n;
}
inline NodePtr variable(char v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::variable;
    n->var = v;
    return n;
}
inline NodePtr binary(Node::Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}
inline NodePtr negate(NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::neg;
    n->lhs = std::move(a);
    return n;
}

// ---------------------------------------------------------------------------
// evaluation

struct Assignment {
    Index k = 1, l = 1, m = 1, n = 1;
    Index get(char var) const {
        switch (var) {
            case 'k': return k;
            case 'l': return l;
            case 'm': return m;
            case 'n': return n;
        }
        throw Error(std::string("unknown variable '") + var + "'");
    }
};

namespace detail {

inline Scalar eval_node(const Node& node, ValueMode mode, const Assignment& at) {
    switch (node.kind) {
        case Node::Kind::constant:
            return mode == ValueMode::rational ? Scalar::rational(node.value)
                                               : Scalar::real(node.value.convert_to<double>());
        case Node::Kind::variable:
            return Scalar::integer(at.get(node.var), mode);
        case Node::Kind::neg:
            return -eval_node(*node.lhs, mode, at);
        case Node::Kind::add:
            return eval_node(*node.lhs, mode, at) + eval_node(*node.rhs, mode, at);
        case Node::Kind::sub:
            return eval_node(*node.lhs, mode, at) - eval_node(*node.rhs, mode, at);
        case Node::Kind::mul:
            return eval_node(*node.lhs, mode, at) * eval_node(*node.rhs, mode, at);
        case Node::Kind::div:
            return eval_node(*node.lhs, mode, at) / eval_node(*node.rhs, mode, at);
        case Node::Kind::pow: {
            Scalar base = eval_node(*node.lhs, mode, at);
            Scalar expv = eval_node(*node.rhs, mode, at);
            long long e;
            if (expv.mode() == ValueMode::rational) {
                const Rational& r = expv.rat();
                if (denominator(r) != 1 || r < 0)
                    throw EvalError("exponent must be a nonnegative integer, got " + expv.str(), 0, 0);
                e = numerator(r).convert_to<long long>();
            } else {
                double d = expv.dbl();
                if (d < 0 || d != std::floor(d))
                    throw EvalError("exponent must be a nonnegative integer, got " + expv.str(), 0, 0);
                e = static_cast<long long>(d);
            }
            return base.pow_nonneg(e);
        }
    }
    throw Error("corrupt expression node");
}

inline bool eval_cond(const Cond& c, ValueMode mode, const Assignment& at) {
    switch (c.kind) {
        case Cond::Kind::always: return true;
        case Cond::Kind::conj: return eval_cond(*c.a, mode, at) && eval_cond(*c.b, mode, at);
        case Cond::Kind::disj: return eval_cond(*c.a, mode, at) || eval_cond(*c.b, mode, at);
        case Cond::Kind::cmp: {
            Scalar a = eval_node(*c.lhs, mode, at);
            Scalar b = eval_node(*c.rhs, mode, at);
            switch (c.op) {
                case Cond::Op::eq: return a == b;
                case Cond::Op::le: return a <= b;
                case Cond::Op::lt: return a < b;
                case Cond::Op::ge: return a >= b;
                case Cond::Op::gt: return a > b;
            }
        }
    }
    throw Error("corrupt condition node");
}

}  // namespace detail

// First matching piece wins; the trailing default guarantees totality.
inline Scalar eval(const Piecewise& pw, ValueMode mode, const Assignment& at) {
    try {
        for (const Piece& p : pw.pieces)
            if (detail::eval_cond(*p.cond, mode, at)) return detail::eval_node(*p.value, mode, at);
    } catch (const EvalError& e) {
        throw EvalError(std::string(e.what()), at.k, at.l, at.m, at.n);
    }
    throw Error("piecewise expression without default piece");
}

// ---------------------------------------------------------------------------
// parser

namespace detail {

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1, col = 1;

    struct Token {
        enum class Kind { number, ident, punct, end };
        Kind kind;
        std::string spell;
        int line, col;
    };

    Token peeked;
    bool has_peeked = false;

    void advance_char() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    Token lex() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r'))
            advance_char();
        Token t;
        t.line = line;
        t.col = col;
        if (pos >= text.size()) {
            t.kind = Token::Kind::end;
            return t;
        }
        char c = text[pos];
        if (c >= '0' && c <= '9') {
            t.kind = Token::Kind::number;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                t.spell += text[pos];
                advance_char();
            }
            return t;
        }
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            t.kind = Token::Kind::ident;
            while (pos < text.size() &&
                   ((text[pos] >= 'a' && text[pos] <= 'z') || (text[pos] >= 'A' && text[pos] <= 'Z') ||
                    (text[pos] >= '0' && text[pos] <= '9') || text[pos] == '_')) {
                t.spell += text[pos];
                advance_char();
            }
            return t;
        }
        t.kind = Token::Kind::punct;
        t.spell += c;
        advance_char();
        if ((c == '<' || c == '>' || c == '=') && pos < text.size() && text[pos] == '=') {
            t.spell += '=';
            advance_char();
        }
        return t;
    }

    Token peek() {
        if (!has_peeked) {
            peeked = lex();
            has_peeked = true;
        }
        return peeked;
    }
    Token next() {
        Token t = peek();
        has_peeked = false;
        return t;
    }
};

class Parser {
public:
    Parser(std::string_view text, VarSet vars) : lx_{text}, vars_(vars) {}

    Piecewise parse_top() {
        Piecewise pw;
        pw.vars = vars_;
        if (lx_.peek().kind == Lexer::Token::Kind::ident && lx_.peek().spell == "piece") {
            while (lx_.peek().kind == Lexer::Token::Kind::ident && lx_.peek().spell == "piece")
                pw.pieces.push_back(parse_piece());
            if (pw.pieces.back().cond->kind != Cond::Kind::always)
                fail("last piece must be the default piece(true, ...)", lx_.peek());
        } else {
            Piece def;
            auto c = std::make_shared<Cond>();
            c->kind = Cond::Kind::always;
            def.cond = c;
            def.value = parse_expr();
            pw.pieces.push_back(std::move(def));
        }
        auto t = lx_.peek();
        if (t.kind != Lexer::Token::Kind::end) fail("expected end of expression, found '" + t.spell + "'", t);
        return pw;
    }

private:
    Lexer lx_;
    VarSet vars_;

    [[noreturn]] void fail(const std::string& msg, const Lexer::Token& at) { throw ParseError(msg, at.line, at.col); }

    void expect_punct(const std::string& p) {
        auto t = lx_.next();
        if (t.kind != Lexer::Token::Kind::punct || t.spell != p)
            fail("expected '" + p + "', found '" + (t.kind == Lexer::Token::Kind::end ? "end of input" : t.spell) + "'", t);
    }

    Piece parse_piece() {
        lx_.next();  // 'piece'
        expect_punct("(");
        Piece p;
        p.cond = parse_cond();
        expect_punct(",");
        p.value = parse_expr();
        expect_punct(")");
        return p;
    }

    CondPtr parse_cond() {  // disjunction, lowest
        CondPtr a = parse_conj();
        while (lx_.peek().kind == Lexer::Token::Kind::ident && lx_.peek().spell == "or") {
            lx_.next();
            auto c = std::make_shared<Cond>();
            c->kind = Cond::Kind::disj;
            c->a = a;
            c->b = parse_conj();
            a = c;
        }
        return a;
    }

    CondPtr parse_conj() {
        CondPtr a = parse_cmp();
        while (lx_.peek().kind == Lexer::Token::Kind::ident && lx_.peek().spell == "and") {
            lx_.next();
            auto c = std::make_shared<Cond>();
            c->kind = Cond::Kind::conj;
            c->a = a;
            c->b = parse_cmp();
            a = c;
        }
        return a;
    }

    CondPtr parse_cmp() {
        auto t = lx_.peek();
        if (t.kind == Lexer::Token::Kind::ident && t.spell == "true") {
            lx_.next();
            auto c = std::make_shared<Cond>();
            c->kind = Cond::Kind::always;
            return c;
        }
        auto c = std::make_shared<Cond>();
        c->kind = Cond::Kind::cmp;
        c->lhs = parse_expr();
        auto op = lx_.next();
        if (op.kind != Lexer::Token::Kind::punct) fail("expected comparison operator", op);
        if (op.spell == "==") c->op = Cond::Op::eq;
        else if (op.spell == "<=") c->op = Cond::Op::le;
        else if (op.spell == "<") c->op = Cond::Op::lt;
        else if (op.spell == ">=") c->op = Cond::Op::ge;
        else if (op.spell == ">") c->op = Cond::Op::gt;
        else fail("expected one of == <= < >= >, found '" + op.spell + "'", op);
        c->rhs = parse_expr();
        return c;
    }

    NodePtr parse_expr() {
        NodePtr a = parse_term();
        for (;;) {
            auto t = lx_.peek();
            if (t.kind == Lexer::Token::Kind::punct && (t.spell == "+" || t.spell == "-")) {
                lx_.next();
                a = binary(t.spell == "+" ? Node::Kind::add : Node::Kind::sub, a, parse_term());
            } else {
                return a;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr a = parse_factor();
        for (;;) {
            auto t = lx_.peek();
            if (t.kind == Lexer::Token::Kind::punct && (t.spell == "*" || t.spell == "/")) {
                lx_.next();
                a = binary(t.spell == "*" ? Node::Kind::mul : Node::Kind::div, a, parse_factor());
            } else {
                return a;
            }
        }
    }

    NodePtr parse_factor() {
        auto t = lx_.peek();
        if (t.kind == Lexer::Token::Kind::punct && t.spell == "-") {
            lx_.next();
            return negate(parse_factor());
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        auto t = lx_.peek();
        if (t.kind == Lexer::Token::Kind::punct && t.spell == "^") {
            lx_.next();
            return binary(Node::Kind::pow, base, parse_factor());  // right-assoc
        }
        return base;
    }

    NodePtr parse_atom() {
        auto t = lx_.next();
        if (t.kind == Lexer::Token::Kind::number) {
            return constant(Rational(BigInt(t.spell)));
        }
        if (t.kind == Lexer::Token::Kind::ident) {
            if (t.spell.size() == 1) {
                char v = t.spell[0];
                bool ok = (v == 'k' || v == 'l') || (vars_ == VarSet::matrix && (v == 'm' || v == 'n'));
                if (ok) return variable(v);
            }
            fail("unknown variable '" + t.spell + "'" +
                     (vars_ == VarSet::matrix ? std::string(" (expected one of m, n, k, l)")
                                              : std::string(" (expected one of k, l)")),
                 t);
        }
        if (t.kind == Lexer::Token::Kind::punct && t.spell == "(") {
            NodePtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        fail("expected a number, variable, or '(', found '" +
                 (t.kind == Lexer::Token::Kind::end ? "end of input" : t.spell) + "'",
             t);
    }
};

}  // namespace detail

inline Piecewise parse(std::string_view text, VarSet vars) { return detail::Parser(text, vars).parse_top(); }

// ---------------------------------------------------------------------------
// printing (canonical form; reparsing yields a structurally identical tree)

namespace detail {

inline int precedence(Node::Kind k) {
    switch (k) {
        case Node::Kind::add:
        case Node::Kind::sub: return 1;
        case Node::Kind::mul:
        case Node::Kind::div: return 2;
        case Node::Kind::neg: return 3;
        case Node::Kind::pow: return 4;
        default: return 5;
    }
}

inline void print_node(const Node& n, std::string& out, int parent_prec, bool rhs_of_noncommutative) {
    int prec = precedence(n.kind);
    bool parens = prec < parent_prec || (prec == parent_prec && rhs_of_noncommutative);
    if (parens) out += '(';
    switch (n.kind) {
        case Node::Kind::constant:
            if (n.value < 0) {
                out += '-';
                out += Rational(-n.value).str();
            } else {
                out += n.value.str();
            }
            break;
        case Node::Kind::variable: out += n.var; break;
        case Node::Kind::neg:
            out += '-';
            print_node(*n.lhs, out, precedence(Node::Kind::neg), true);
            break;
        case Node::Kind::add:
        case Node::Kind::sub:
            print_node(*n.lhs, out, prec, false);
            out += n.kind == Node::Kind::add ? " + " : " - ";
            print_node(*n.rhs, out, prec, true);
            break;
        case Node::Kind::mul:
        case Node::Kind::div:
            print_node(*n.lhs, out, prec, false);
            out += n.kind == Node::Kind::mul ? "*" : "/";
            print_node(*n.rhs, out, prec, true);
            break;
        case Node::Kind::pow:
            print_node(*n.lhs, out, prec + 1, false);  // base parenthesized unless atomic
            out += '^';
            print_node(*n.rhs, out, prec, false);  // right-assoc
            break;
    }
    if (parens) out += ')';
}

inline void print_cond(const Cond& c, std::string& out, bool inside_conj) {
    switch (c.kind) {
        case Cond::Kind::always: out += "true"; break;
        case Cond::Kind::cmp: {
            print_node(*c.lhs, out, 0, false);
            switch (c.op) {
                case Cond::Op::eq: out += " == "; break;
                case Cond::Op::le: out += " <= "; break;
                case Cond::Op::lt: out += " < "; break;
                case Cond::Op::ge: out += " >= "; break;
                case Cond::Op::gt: out += " > "; break;
            }
            print_node(*c.rhs, out, 0, false);
            break;
        }
        case Cond::Kind::conj:
            print_cond(*c.a, out, true);
            out += " and ";
            print_cond(*c.b, out, true);
            break;
        case Cond::Kind::disj:
            // `and` binds tighter; a disjunction nested under a conjunction cannot
            // be produced by the parser, so no parens are ever required.
            print_cond(*c.a, out, false);
            out += " or ";
            print_cond(*c.b, out, false);
            break;
    }
    (void)inside_conj;
}

}  // namespace detail

inline std::string to_string(const Piecewise& pw) {
    if (pw.pieces.size() == 1 && pw.pieces[0].cond->kind == Cond::Kind::always) {
        std::string out;
        detail::print_node(*pw.pieces[0].value, out, 0, false);
        return out;
    }
    std::string out;
    for (std::size_t i = 0; i < pw.pieces.size(); ++i) {
        if (i) out += ' ';
        out += "piece(";
        detail::print_cond(*pw.pieces[i].cond, out, false);
        out += ", ";
        detail::print_node(*pw.pieces[i].value, out, 0, false);
        out += ')';
    }
    return out;
}

// ---------------------------------------------------------------------------
// structural equality (for the parse/print round-trip property)

inline bool equal(const NodePtr& a, const NodePtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Node::Kind::constant: return a->value == b->value;
        case Node::Kind::variable: return a->var == b->var;
        case Node::Kind::neg: return equal(a->lhs, b->lhs);
        default: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    }
}

inline bool equal(const CondPtr& a, const CondPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Cond::Kind::always: return true;
        case Cond::Kind::cmp: return a->op == b->op && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
        default: return equal(a->a, b->a) && equal(a->b, b->b);
    }
}

inline bool equal(const Piecewise& a, const Piecewise& b) {
    if (a.pieces.size() != b.pieces.size()) return false;
    for (std::size_t i = 0; i < a.pieces.size(); ++i)
        if (!equal(a.pieces[i].cond, b.pieces[i].cond) || !equal(a.pieces[i].value, b.pieces[i].value)) return false;
    return true;
}

}  // namespace hahn::expr
