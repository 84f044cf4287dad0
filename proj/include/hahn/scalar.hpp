#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <variant>

#include "hahn/base.hpp"

namespace hahn {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

enum class ValueMode { rational, real };

inline const char* to_string(ValueMode m) {
    return m == ValueMode::rational ? "rational" : "float";
}

// Exact rational or double-precision value. The mode is fixed per value and
// arithmetic between the two modes is rejected rather than coerced.
class Scalar {
public:
    Scalar() : v_(Rational(0)) {}

    static Scalar rational(Rational r) { return Scalar(std::move(r)); }
    static Scalar rational(long long num, long long den = 1) {
        if (den == 0) throw EvalError("rational with zero denominator", 0, 0);
        return Scalar(Rational(num, den));
    }
    static Scalar real(double v) { return Scalar(v); }
    static Scalar zero(ValueMode m) { return integer(0, m); }
    static Scalar one(ValueMode m) { return integer(1, m); }
    static Scalar integer(long long v, ValueMode m) {
        return m == ValueMode::rational ? Scalar(Rational(v)) : Scalar(static_cast<double>(v));
    }

    ValueMode mode() const { return std::holds_alternative<Rational>(v_) ? ValueMode::rational : ValueMode::real; }
    bool is_rational() const { return mode() == ValueMode::rational; }

    const Rational& rat() const {
        if (!is_rational()) throw ModeMismatchError("float scalar used where a rational is required");
        return std::get<Rational>(v_);
    }
    double dbl() const {
        if (is_rational()) throw ModeMismatchError("rational scalar used where a float is required");
        return std::get<double>(v_);
    }
    // Lossy view, valid in either mode.
    double to_double() const {
        return is_rational() ? std::get<Rational>(v_).convert_to<double>() : std::get<double>(v_);
    }

    bool is_zero() const { return is_rational() ? std::get<Rational>(v_).is_zero() : std::get<double>(v_) == 0.0; }
    bool is_negative() const { return is_rational() ? std::get<Rational>(v_) < 0 : std::get<double>(v_) < 0.0; }

    Scalar operator-() const {
        return is_rational() ? Scalar(Rational(-std::get<Rational>(v_))) : Scalar(-std::get<double>(v_));
    }
    Scalar abs() const { return is_negative() ? -*this : *this; }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        check(a, b, "+");
        if (a.is_rational()) return Scalar(Rational(a.rat() + b.rat()));
        return Scalar(a.dbl() + b.dbl());
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        check(a, b, "-");
        if (a.is_rational()) return Scalar(Rational(a.rat() - b.rat()));
        return Scalar(a.dbl() - b.dbl());
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        check(a, b, "*");
        if (a.is_rational()) return Scalar(Rational(a.rat() * b.rat()));
        return Scalar(a.dbl() * b.dbl());
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        check(a, b, "/");
        if (b.is_zero()) throw EvalError("division by zero", 0, 0);
        if (a.is_rational()) return Scalar(Rational(a.rat() / b.rat()));
        return Scalar(a.dbl() / b.dbl());
    }
    Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
    Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
    Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

    // Integer scaling keeps the operand's mode; used for the ubiquitous k*l weights.
    friend Scalar operator*(const Scalar& a, Index w) { return a * Scalar::integer(w, a.mode()); }
    friend Scalar operator*(Index w, const Scalar& a) { return a * w; }
    friend Scalar operator/(const Scalar& a, Index w) { return a / Scalar::integer(w, a.mode()); }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        check(a, b, "==");
        return a.is_rational() ? a.rat() == b.rat() : a.dbl() == b.dbl();
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
    friend bool operator<(const Scalar& a, const Scalar& b) {
        check(a, b, "<");
        return a.is_rational() ? a.rat() < b.rat() : a.dbl() < b.dbl();
    }
    friend bool operator>(const Scalar& a, const Scalar& b) { return b < a; }
    friend bool operator<=(const Scalar& a, const Scalar& b) { return !(b < a); }
    friend bool operator>=(const Scalar& a, const Scalar& b) { return !(a < b); }

    // x^e with e >= 0; the only exponentiation the expression language allows.
    Scalar pow_nonneg(long long e) const {
        if (e < 0) throw EvalError("negative exponent", 0, 0);
        Scalar acc = one(mode());
        Scalar base = *this;
        while (e > 0) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    // Rationals render as "num/den" (lossless); floats with 17 significant digits.
    std::string str() const {
        if (is_rational()) {
            const Rational& r = rat();
            return numerator(r).str() + "/" + denominator(r).str();
        }
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", dbl());
        return buf;
    }

    // Shorter display form: integers without the "/1".
    std::string pretty() const {
        if (is_rational() && denominator(rat()) == 1) return numerator(rat()).str();
        return str();
    }

private:
    explicit Scalar(Rational r) : v_(std::move(r)) {}
    explicit Scalar(double d) : v_(d) {}

    static void check(const Scalar& a, const Scalar& b, const char* op) {
        if (a.mode() != b.mode())
            throw ModeMismatchError(std::string("cannot apply '") + op + "' to rational and float values");
    }

    std::variant<Rational, double> v_;
};

// Exact conversion: every double is a dyadic rational.
inline Scalar to_mode(double v, ValueMode m) {
    return m == ValueMode::rational ? Scalar::rational(Rational(v)) : Scalar::real(v);
}

}  // namespace hahn
