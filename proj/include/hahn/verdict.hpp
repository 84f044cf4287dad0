#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hahn/base.hpp"
#include "hahn/scalar.hpp"

namespace hahn {

// Convergence notion for double sequences: Pringsheim (p), bounded
// Pringsheim (bp), or regular (r).
enum class ThetaMode { p, bp, r };

inline const char* to_string(ThetaMode m) {
    switch (m) {
        case ThetaMode::p: return "p";
        case ThetaMode::bp: return "bp";
        case ThetaMode::r: return "r";
    }
    return "?";
}

enum class Outcome { holds, fails, inconclusive };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::holds: return "holds";
        case Outcome::fails: return "fails";
        case Outcome::inconclusive: return "inconclusive";
    }
    return "?";
}

// Three-valued answer to a limit/sup/membership question decided from finite
// windows. Holds carries the value, Fails carries a witness, Inconclusive
// carries per-refinement diagnostics. Questions about infinite index sets are
// genuinely undecidable from samples, so Inconclusive is a first-class result
// and is never coerced into either definite outcome.
struct Verdict {
    Outcome outcome = Outcome::inconclusive;
    std::optional<Scalar> value;
    std::optional<IndexPair> witness;
    std::vector<double> diagnostics;  // frontier deviations / stat increments per step
    std::string note;

    bool holds() const { return outcome == Outcome::holds; }
    bool fails() const { return outcome == Outcome::fails; }
    bool inconclusive() const { return outcome == Outcome::inconclusive; }

    static Verdict holds_with(Scalar v, std::string note = "") {
        Verdict r;
        r.outcome = Outcome::holds;
        r.value = std::move(v);
        r.note = std::move(note);
        return r;
    }
    static Verdict fails_at(IndexPair w, std::string note = "", std::optional<Scalar> value = std::nullopt) {
        Verdict r;
        r.outcome = Outcome::fails;
        r.witness = w;
        r.value = std::move(value);
        r.note = std::move(note);
        return r;
    }
    static Verdict inconclusive_with(std::vector<double> diags, std::string note = "") {
        Verdict r;
        r.outcome = Outcome::inconclusive;
        r.diagnostics = std::move(diags);
        r.note = std::move(note);
        return r;
    }
};

// Three-valued conjunction: Fails dominates, then Inconclusive.
inline Verdict conjoin(const Verdict& a, const Verdict& b) {
    if (a.fails()) return a;
    if (b.fails()) return b;
    if (a.inconclusive()) return a;
    if (b.inconclusive()) return b;
    return a;
}

// Window schedule and tolerances steering every finite-window decision.
struct LimitSpec {
    ThetaMode mode = ThetaMode::bp;
    double tol = 1e-9;
    std::vector<Window> windows;
    int stability_count = 3;

    static LimitSpec defaults(ThetaMode mode = ThetaMode::bp) {
        LimitSpec s;
        s.mode = mode;
        for (int i = 0; i <= 5; ++i) s.windows.push_back(Window{Index(16) << i, Index(16) << i});
        return s;
    }

    // Doubling square windows from 16x16 up to at most `top`.
    static LimitSpec geometric(ThetaMode mode, Index top, double tol = 1e-9, int stability = 3) {
        LimitSpec s;
        s.mode = mode;
        s.tol = tol;
        s.stability_count = stability;
        for (Index w = 16; w < top; w *= 2) s.windows.push_back(Window{w, w});
        s.windows.push_back(Window{top, top});
        return s;
    }

    LimitSpec with_mode(ThetaMode m) const {
        LimitSpec s = *this;
        s.mode = m;
        return s;
    }

    void validate() const {
        if (windows.empty()) throw Error("limit spec has an empty window schedule");
        if (stability_count < 1) throw Error("stability_count must be >= 1");
        if (tol < 0) throw Error("tol must be nonnegative");
        for (std::size_t i = 0; i + 1 < windows.size(); ++i)
            if (windows[i + 1].rows <= windows[i].rows || windows[i + 1].cols <= windows[i].cols)
                throw Error("window schedule must be strictly increasing in both dimensions");
        for (const Window& w : windows)
            if (w.rows < 1 || w.cols < 1) throw Error("windows must be at least 1x1");
    }
};

}  // namespace hahn
