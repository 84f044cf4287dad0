#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hahn/expr.hpp"
#include "hahn/scalar.hpp"

using namespace hahn;

TEST_CASE("scalar arithmetic is exact in rational mode") {
    Scalar a = Scalar::rational(1, 3);
    Scalar b = Scalar::rational(2, 5);
    CHECK((a + b).str() == "11/15");
    CHECK((a * b).str() == "2/15");
    CHECK((a - b).str() == "-1/15");
    CHECK((a / b).str() == "5/6");
    CHECK((-b).str() == "-2/5");
    CHECK(Scalar::rational(-7, 2).abs().str() == "7/2");
    CHECK(Scalar::rational(3, 4).pow_nonneg(3).str() == "27/64");
    CHECK(Scalar::rational(5).pow_nonneg(0).str() == "1/1");
}

TEST_CASE("scalar rejects mode mixing and division by zero") {
    Scalar r = Scalar::rational(1, 2);
    Scalar f = Scalar::real(0.5);
    CHECK_THROWS_AS(r + f, ModeMismatchError);
    CHECK_THROWS_AS(r == f, ModeMismatchError);
    CHECK_THROWS_AS(r / Scalar::rational(0), EvalError);
    CHECK(r.to_double() == 0.5);
    CHECK(f.dbl() == 0.5);
    CHECK_THROWS_AS(f.rat(), ModeMismatchError);
}

TEST_CASE("float scalars print with 17 significant digits") {
    Scalar f = Scalar::real(1.0 / 3.0);
    CHECK(f.str() == "0.33333333333333331");
}

TEST_CASE("integer weights scale in the scalar's own mode") {
    Scalar r = Scalar::rational(1, 6);
    CHECK((r * 4).str() == "2/3");
    CHECK((r / 2).str() == "1/12");
    Scalar f = Scalar::real(0.25);
    CHECK((3 * f).dbl() == 0.75);
}

// -- expression language -----------------------------------------------------

static Scalar eval_seq(const std::string& text, ValueMode mode, Index k, Index l) {
    auto pw = expr::parse(text, expr::VarSet::sequence);
    return expr::eval(pw, mode, expr::Assignment{k, l, 0, 0});
}

TEST_CASE("closed forms evaluate with standard precedence") {
    CHECK(eval_seq("1/(k*l)", ValueMode::rational, 4, 4).str() == "1/16");
    CHECK(eval_seq("k + l * 2", ValueMode::rational, 3, 4).str() == "11/1");
    CHECK(eval_seq("(k + l) * 2", ValueMode::rational, 3, 4).str() == "14/1");
    CHECK(eval_seq("2^3^1", ValueMode::rational, 1, 1).str() == "8/1");
    CHECK(eval_seq("-k^2", ValueMode::rational, 3, 1).str() == "-9/1");
    CHECK(eval_seq("1/(k*l)^2", ValueMode::rational, 2, 3).str() == "1/36");
    CHECK(eval_seq("k - l - 1", ValueMode::rational, 10, 3).str() == "6/1");
}

TEST_CASE("pieces select the first matching guard") {
    auto pw = expr::parse("piece(k==1, 1/l) piece(true, 0)", expr::VarSet::sequence);
    CHECK(expr::eval(pw, ValueMode::rational, {1, 7, 0, 0}).str() == "1/7");
    CHECK(expr::eval(pw, ValueMode::rational, {2, 7, 0, 0}).is_zero());

    auto diag = expr::parse("piece(k==l, 1/(k*l)) piece(true, 0)", expr::VarSet::sequence);
    CHECK(expr::eval(diag, ValueMode::rational, {3, 3, 0, 0}).str() == "1/9");
    CHECK(expr::eval(diag, ValueMode::rational, {3, 4, 0, 0}).is_zero());

    auto banded = expr::parse("piece(k<=2 and l<=3 or k==l, 1) piece(true, 0)", expr::VarSet::sequence);
    CHECK(expr::eval(banded, ValueMode::rational, {2, 3, 0, 0}).str() == "1/1");
    CHECK(expr::eval(banded, ValueMode::rational, {5, 5, 0, 0}).str() == "1/1");
    CHECK(expr::eval(banded, ValueMode::rational, {5, 4, 0, 0}).is_zero());
}

TEST_CASE("matrix expressions see m and n") {
    auto t = expr::parse("piece(k<=m and l<=n, 1/(m*n)) piece(true, 0)", expr::VarSet::matrix);
    CHECK(expr::eval(t, ValueMode::rational, {1, 1, 2, 3}).str() == "1/6");
    CHECK(expr::eval(t, ValueMode::rational, {3, 1, 2, 3}).is_zero());
    CHECK_THROWS_AS(expr::parse("1/(m*n)", expr::VarSet::sequence), ParseError);
}

TEST_CASE("variable exponents must evaluate to nonnegative integers") {
    CHECK(eval_seq("(-1)^l", ValueMode::rational, 1, 4).str() == "1/1");
    CHECK(eval_seq("(-1)^l", ValueMode::rational, 1, 5).str() == "-1/1");
    CHECK(eval_seq("(-1)^l", ValueMode::real, 1, 5).dbl() == -1.0);
    CHECK_THROWS_AS(eval_seq("2^(0-1)", ValueMode::rational, 1, 1), EvalError);
    CHECK_THROWS_AS(eval_seq("2^(1/2)", ValueMode::rational, 1, 1), EvalError);
}

TEST_CASE("division by zero reports the offending indices") {
    try {
        eval_seq("1/(k - l)", ValueMode::rational, 3, 3);
        FAIL("expected EvalError");
    } catch (const EvalError& e) {
        CHECK(e.k == 3);
        CHECK(e.l == 3);
    }
    CHECK(eval_seq("1/(k - l)", ValueMode::rational, 4, 3).str() == "1/1");
}

TEST_CASE("parse errors carry position and expectation") {
    try {
        expr::parse("1 + ", expr::VarSet::sequence);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.column == 5);
        CHECK(e.message.find("expected") != std::string::npos);
    }
    CHECK_THROWS_AS(expr::parse("piece(k==1, 1)", expr::VarSet::sequence), ParseError);  // no default
    CHECK_THROWS_AS(expr::parse("piece(true, 1) junk", expr::VarSet::sequence), ParseError);
    CHECK_THROWS_AS(expr::parse("q + 1", expr::VarSet::sequence), ParseError);
    CHECK_THROWS_AS(expr::parse("1 ** 2", expr::VarSet::sequence), ParseError);
}

// -- print/parse round-trip property ------------------------------------------

namespace {

expr::NodePtr random_node(std::mt19937_64& rng, int depth, expr::VarSet vars) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
    switch (pick(rng)) {
        case 0: {
            std::uniform_int_distribution<long long> c(0, 12);
            return expr::constant(Rational(c(rng)));
        }
        case 1: {
            const char seq_vars[] = {'k', 'l'};
            const char mat_vars[] = {'m', 'n', 'k', 'l'};
            if (vars == expr::VarSet::sequence) return expr::variable(seq_vars[rng() % 2]);
            return expr::variable(mat_vars[rng() % 4]);
        }
        case 2: return expr::binary(expr::Node::Kind::add, random_node(rng, depth - 1, vars), random_node(rng, depth - 1, vars));
        case 3: return expr::binary(expr::Node::Kind::sub, random_node(rng, depth - 1, vars), random_node(rng, depth - 1, vars));
        case 4: return expr::binary(expr::Node::Kind::mul, random_node(rng, depth - 1, vars), random_node(rng, depth - 1, vars));
        case 5: return expr::binary(expr::Node::Kind::div, random_node(rng, depth - 1, vars), random_node(rng, depth - 1, vars));
        default: return expr::negate(random_node(rng, depth - 1, vars));
    }
}

expr::CondPtr random_cond(std::mt19937_64& rng, int depth, expr::VarSet vars) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 2);
    auto c = std::make_shared<expr::Cond>();
    switch (pick(rng)) {
        case 0: {
            c->kind = expr::Cond::Kind::cmp;
            const expr::Cond::Op ops[] = {expr::Cond::Op::eq, expr::Cond::Op::le, expr::Cond::Op::lt,
                                          expr::Cond::Op::ge, expr::Cond::Op::gt};
            c->op = ops[rng() % 5];
            c->lhs = random_node(rng, 1, vars);
            c->rhs = random_node(rng, 1, vars);
            return c;
        }
        case 1: c->kind = expr::Cond::Kind::conj; break;
        default: c->kind = expr::Cond::Kind::disj; break;
    }
    c->a = random_cond(rng, 0, vars);  // keep conj/disj flat: `and` binds tighter than `or`,
    c->b = random_cond(rng, 0, vars);  // so only parser-producible shapes are generated
    return c;
}

}  // namespace

TEST_CASE("printing then reparsing yields a structurally identical expression") {
    std::mt19937_64 rng(20240811);
    for (int iter = 0; iter < 300; ++iter) {
        expr::Piecewise pw;
        pw.vars = iter % 2 ? expr::VarSet::matrix : expr::VarSet::sequence;
        std::uniform_int_distribution<int> npieces(0, 2);
        int extra = npieces(rng);
        for (int i = 0; i < extra; ++i) {
            expr::Piece p;
            p.cond = random_cond(rng, 1, pw.vars);
            p.value = random_node(rng, 3, pw.vars);
            pw.pieces.push_back(std::move(p));
        }
        expr::Piece def;
        auto always = std::make_shared<expr::Cond>();
        always->kind = expr::Cond::Kind::always;
        def.cond = always;
        def.value = random_node(rng, 3, pw.vars);
        pw.pieces.push_back(std::move(def));

        std::string printed = expr::to_string(pw);
        INFO(printed);
        expr::Piecewise back = expr::parse(printed, pw.vars);
        CHECK(expr::equal(pw, back));
        CHECK(expr::to_string(back) == printed);
    }
}
