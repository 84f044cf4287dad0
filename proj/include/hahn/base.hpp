#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace hahn {

using Index = std::int64_t;

// Sentinel for unbounded index ranges. Kept well below the integer maximum so
// that `kUnbounded + small` cannot overflow.
inline constexpr Index kUnbounded = std::numeric_limits<Index>::max() / 4;

struct IndexPair {
    Index k = 1;
    Index l = 1;
    friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

// Rectangular evaluation range [1..rows] x [1..cols].
struct Window {
    Index rows = 1;
    Index cols = 1;
    friend bool operator==(const Window&, const Window&) = default;
};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Rational and floating-point values met in one arithmetic expression.
class ModeMismatchError : public Error {
public:
    explicit ModeMismatchError(const std::string& what) : Error(what) {}
};

// Expression evaluation failed (division by zero, bad exponent); carries the
// offending index assignment.
class EvalError : public Error {
public:
    EvalError(const std::string& what, Index k, Index l, Index m = 0, Index n = 0)
        : Error(what), k(k), l(l), m(m), n(n) {}
    Index k, l, m, n;
};

// Text could not be parsed; position is 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line(line), column(column), message(what) {}
    int line, column;
    std::string message;
};

// A window or probe is too small for an operation that promises exactness.
class WindowError : public Error {
public:
    explicit WindowError(const std::string& what) : Error(what) {}
};

// Bad command, unknown object, unsupported class id, and similar user errors.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(what) {}
};

}  // namespace hahn
