#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "hahn/base.hpp"
#include "hahn/scalar.hpp"
#include "hahn/sequence.hpp"
#include "hahn/verdict.hpp"

// Finite-window decision procedures for theta-limits, sups, and series sums.
//
// The contract is honest rather than optimistic: Holds and Fails are issued
// only on the evidence patterns below, everything else is Inconclusive.
//   - monotone statistics (sups, sums of moduli) hold when the last
//     stability_count refinements agree (exactly in rational mode, within tol
//     in float mode), and fail when the statistic blows past 1e12 or its
//     increments keep growing at ratio >= 0.9 across four refinements — the
//     signature of divergence, while convergent tails shrink geometrically;
//   - pointwise limits inspect the frontier quadrant of each window: the
//     value is the mean of the last frontier, deviations from it must sit
//     below tol for stability_count refinements; non-shrinking frontier
//     spread across four refinements fails (oscillation or escape).
// Finite-support input short-circuits to exact verdicts; no window scan and
// never Inconclusive.

namespace hahn {

namespace convergence_detail {

inline constexpr double kBlowup = 1e12;

struct StatSample {
    Scalar value;
    std::optional<IndexPair> witness;
};

inline Scalar tol_scalar(double tol, ValueMode mode) { return to_mode(tol, mode); }

// increments d_i significant and non-shrinking: 10*d_i >= 9*d_{i-1}
inline bool ratio_keeps_growing(const Scalar& d2, const Scalar& d1, const Scalar& d0, const Scalar& tol) {
    if (!(d0 > tol && d1 > tol && d2 > tol)) return false;
    Scalar ten = Scalar::integer(10, d0.mode()), nine = Scalar::integer(9, d0.mode());
    return ten * d1 >= nine * d0 && ten * d2 >= nine * d1;
}

using Partials = std::vector<std::pair<Window, Scalar>>;

// Decision engine for statistics that can only grow under window refinement.
inline Verdict decide_monotone_stat(const std::function<StatSample(const Window&)>& stat, ValueMode mode,
                                    const LimitSpec& spec, const std::string& what, Partials* partials = nullptr) {
    spec.validate();
    if (mode == ValueMode::real && spec.tol <= 0) throw Error("float mode requires a positive tol");
    const Scalar stab_tol = mode == ValueMode::rational ? Scalar::zero(mode) : tol_scalar(spec.tol, mode);
    const Scalar grow_tol = mode == ValueMode::rational ? Scalar::zero(mode) : tol_scalar(spec.tol, mode);
    const Scalar blowup = to_mode(kBlowup, mode);

    std::vector<Scalar> values;
    std::vector<Scalar> diffs;
    std::vector<double> diag;
    std::optional<IndexPair> last_witness;

    for (const Window& w : spec.windows) {
        StatSample s = stat(w);
        if (partials) partials->push_back({w, s.value});
        if (s.witness) last_witness = s.witness;
        if (s.value.abs() >= blowup)
            return Verdict::fails_at(last_witness.value_or(IndexPair{w.rows, w.cols}),
                                     what + " exceeds 1e12 at window " + std::to_string(w.rows) + "x" +
                                         std::to_string(w.cols),
                                     s.value);
        if (!values.empty()) {
            diffs.push_back(s.value - values.back());
            diag.push_back(diffs.back().to_double());
        }
        values.push_back(s.value);

        int n = static_cast<int>(diffs.size());
        if (n >= spec.stability_count) {
            bool stable = true;
            for (int i = n - spec.stability_count; i < n; ++i)
                if (diffs[static_cast<std::size_t>(i)].abs() > stab_tol) stable = false;
            if (stable) return Verdict::holds_with(s.value, what + " stabilized");
        }
        if (n >= 3 && ratio_keeps_growing(diffs[n - 1], diffs[n - 2], diffs[n - 3], grow_tol))
            return Verdict::fails_at(last_witness.value_or(IndexPair{w.rows, w.cols}),
                                     what + " keeps growing across refinements", s.value);
    }
    return Verdict::inconclusive_with(diag, what + " neither stabilized nor showed sustained growth on the schedule");
}

// Per-window frontier summary for pointwise limits.
struct FrontierSummary {
    Scalar sum;
    std::uint64_t count = 0;
    Scalar maxv, minv;
    IndexPair argmax_abs{1, 1};
};

inline FrontierSummary summarize_frontier(const DoubleSequence& x, Index r1, Index r2, Index c1, Index c2) {
    ValueMode mode = x.mode();
    FrontierSummary fs{Scalar::zero(mode), 0, Scalar::zero(mode), Scalar::zero(mode)};
    fs.count = static_cast<std::uint64_t>(r2 - r1 + 1) * static_cast<std::uint64_t>(c2 - c1 + 1);
    bool any = false;
    Scalar max_abs = Scalar::zero(mode);
    x.support().for_each_in(r1, r2, c1, c2, [&](Index k, Index l) {
        Scalar v = x.eval(k, l);
        fs.sum += v;
        if (!any || v > fs.maxv) fs.maxv = v;
        if (!any || v < fs.minv) fs.minv = v;
        Scalar a = v.abs();
        if (!any || a > max_abs) {
            max_abs = a;
            fs.argmax_abs = IndexPair{k, l};
        }
        any = true;
    });
    // cells outside the support are exactly zero
    bool zeros_present = !x.support().covers(r1, r2, c1, c2);
    if (!any || zeros_present) {
        Scalar z = Scalar::zero(mode);
        if (!any) {
            fs.maxv = fs.minv = z;
            fs.argmax_abs = IndexPair{r1, c1};
        } else {
            if (z > fs.maxv) fs.maxv = z;
            if (z < fs.minv) fs.minv = z;
        }
    }
    return fs;
}

// Pointwise limit of x over the frontier quadrants of the scheduled windows.
inline Verdict decide_pointwise_limit(const DoubleSequence& x, const LimitSpec& spec, const std::string& what,
                                      Partials* partials = nullptr) {
    spec.validate();
    ValueMode mode = x.mode();
    if (spec.tol <= 0 && !(mode == ValueMode::rational && x.finite_support()))
        throw Error("tol = 0 is allowed only in rational mode with finite support");
    const Scalar tol = tol_scalar(spec.tol, mode);
    const Scalar blowup = to_mode(kBlowup, mode);

    std::vector<FrontierSummary> fs;
    std::vector<Scalar> spreads;
    std::vector<double> diag;
    for (const Window& w : spec.windows) {
        Index r1 = w.rows / 2 + 1, c1 = w.cols / 2 + 1;
        FrontierSummary s = summarize_frontier(x, r1, w.rows, c1, w.cols);
        if (s.maxv.abs() >= blowup || s.minv.abs() >= blowup)
            return Verdict::fails_at(s.argmax_abs, what + " exceeds 1e12 on the frontier",
                                     s.maxv.abs() > s.minv.abs() ? s.maxv : s.minv);
        fs.push_back(s);
        spreads.push_back(s.maxv - s.minv);
        if (partials) partials->push_back({w, Scalar(s.sum / static_cast<Index>(s.count))});
        std::size_t n = spreads.size();
        if (n >= 4 && spreads[n - 1] > tol && spreads[n - 2] > tol && spreads[n - 3] > tol &&
            spreads[n - 1] >= spreads[n - 2] && spreads[n - 2] >= spreads[n - 3] && spreads[n - 3] >= spreads[n - 4])
            return Verdict::fails_at(s.argmax_abs, what + ": frontier spread does not shrink across refinements");
    }

    const FrontierSummary& last = fs.back();
    Scalar v = last.sum / static_cast<Index>(last.count);
    bool stable = fs.size() >= static_cast<std::size_t>(spec.stability_count);
    for (std::size_t i = fs.size() >= static_cast<std::size_t>(spec.stability_count)
                             ? fs.size() - static_cast<std::size_t>(spec.stability_count)
                             : 0;
         stable && i < fs.size(); ++i) {
        Scalar dev = std::max(fs[i].maxv - v, v - fs[i].minv);
        if (dev > tol) stable = false;
    }
    for (const FrontierSummary& s : fs) diag.push_back(std::max(s.maxv - v, v - s.minv).to_double());
    if (stable) return Verdict::holds_with(v, what + " stabilized on the frontier");
    return Verdict::inconclusive_with(diag, what + ": frontier deviations still above tol on the schedule");
}

// Single-sequence convergence check along one row or column, same evidence
// rules in one dimension. Line lengths come from the window schedule.
struct LineProbe {
    std::function<Scalar(Index)> eval;  // t >= 1
    std::function<bool(Index, Index)> covered;  // support covers [a..b]?
    std::function<void(Index, Index, const std::function<void(Index)>&)> for_each;  // support cells in [a..b]
};

enum class LineResult { converges, fails, inconclusive };

inline LineResult check_line(const LineProbe& line, const std::vector<Index>& lengths, const Scalar& tol,
                             const Scalar& blowup, int stability, Index* fail_at) {
    struct Summary {
        Scalar sum, maxv, minv;
        std::uint64_t count;
        Index argmax;
    };
    ValueMode mode = tol.mode();
    std::vector<Summary> ss;
    std::vector<Scalar> spreads;
    for (Index len : lengths) {
        Index a = len / 2 + 1, b = len;
        Summary s{Scalar::zero(mode), Scalar::zero(mode), Scalar::zero(mode), static_cast<std::uint64_t>(b - a + 1), a};
        bool any = false;
        Scalar max_abs = Scalar::zero(mode);
        line.for_each(a, b, [&](Index t) {
            Scalar v = line.eval(t);
            s.sum += v;
            if (!any || v > s.maxv) s.maxv = v;
            if (!any || v < s.minv) s.minv = v;
            Scalar av = v.abs();
            if (!any || av > max_abs) {
                max_abs = av;
                s.argmax = t;
            }
            any = true;
        });
        if (!any || !line.covered(a, b)) {
            Scalar z = Scalar::zero(mode);
            if (!any) s.maxv = s.minv = z;
            else {
                if (z > s.maxv) s.maxv = z;
                if (z < s.minv) s.minv = z;
            }
        }
        if (s.maxv.abs() >= blowup || s.minv.abs() >= blowup) {
            if (fail_at) *fail_at = s.argmax;
            return LineResult::fails;
        }
        ss.push_back(s);
        spreads.push_back(s.maxv - s.minv);
        std::size_t n = spreads.size();
        if (n >= 4 && spreads[n - 1] > tol && spreads[n - 2] > tol && spreads[n - 3] > tol &&
            spreads[n - 1] >= spreads[n - 2] && spreads[n - 2] >= spreads[n - 3] && spreads[n - 3] >= spreads[n - 4]) {
            if (fail_at) *fail_at = s.argmax;
            return LineResult::fails;
        }
    }
    const Summary& last = ss.back();
    Scalar v = last.sum / static_cast<Index>(last.count);
    if (ss.size() < static_cast<std::size_t>(stability)) return LineResult::inconclusive;
    for (std::size_t i = ss.size() - static_cast<std::size_t>(stability); i < ss.size(); ++i)
        if (std::max(ss[i].maxv - v, v - ss[i].minv) > tol) return LineResult::inconclusive;
    return LineResult::converges;
}

// Row/column convergence of every line reachable inside the last window.
inline Verdict check_all_lines(const DoubleSequence& x, const LimitSpec& spec) {
    ValueMode mode = x.mode();
    const Scalar tol = tol_scalar(spec.tol, mode);
    const Scalar blowup = to_mode(kBlowup, mode);
    std::vector<Index> col_lengths, row_lengths;
    for (const Window& w : spec.windows) col_lengths.push_back(w.cols);
    for (const Window& w : spec.windows) row_lengths.push_back(w.rows);
    const Window last = spec.windows.back();
    const Support& supp = x.support();

    bool any_inconclusive = false;
    for (Index k0 = 1; k0 <= last.rows; ++k0) {
        // rows with no support cells are identically zero
        if (supp.count_in(k0, k0, 1, kUnbounded) == 0) continue;
        LineProbe probe{[&x, k0](Index t) { return x.eval(k0, t); },
                        [&supp, k0](Index a, Index b) { return supp.covers(k0, k0, a, b); },
                        [&supp, k0](Index a, Index b, const std::function<void(Index)>& f) {
                            supp.for_each_in(k0, k0, a, b, [&](Index, Index l) { f(l); });
                        }};
        Index at = 0;
        LineResult r = check_line(probe, col_lengths, tol, blowup, spec.stability_count, &at);
        if (r == LineResult::fails)
            return Verdict::fails_at(IndexPair{k0, at}, "row " + std::to_string(k0) + " does not converge");
        if (r == LineResult::inconclusive) any_inconclusive = true;
    }
    for (Index l0 = 1; l0 <= last.cols; ++l0) {
        if (supp.count_in(1, kUnbounded, l0, l0) == 0) continue;
        LineProbe probe{[&x, l0](Index t) { return x.eval(t, l0); },
                        [&supp, l0](Index a, Index b) { return supp.covers(a, b, l0, l0); },
                        [&supp, l0](Index a, Index b, const std::function<void(Index)>& f) {
                            supp.for_each_in(a, b, l0, l0, [&](Index k, Index) { f(k); });
                        }};
        Index at = 0;
        LineResult r = check_line(probe, row_lengths, tol, blowup, spec.stability_count, &at);
        if (r == LineResult::fails)
            return Verdict::fails_at(IndexPair{at, l0}, "column " + std::to_string(l0) + " does not converge");
        if (r == LineResult::inconclusive) any_inconclusive = true;
    }
    if (any_inconclusive)
        return Verdict::inconclusive_with({}, "some row or column convergence checks did not stabilize");
    return Verdict::holds_with(Scalar::zero(mode), "all rows and columns converge");
}

}  // namespace convergence_detail

// ---------------------------------------------------------------------------
// public operations

// sup_{k,l} |x_{kl}| as a window verdict; exact for finite support.
inline Verdict sup_norm(const DoubleSequence& x, const LimitSpec& spec) {
    using namespace convergence_detail;
    ValueMode mode = x.mode();
    if (x.finite_support()) {
        Window b = x.support_bound();
        Scalar best = Scalar::zero(mode);
        IndexPair arg{1, 1};
        x.support().for_each_in(b, [&](Index k, Index l) {
            Scalar v = x.eval(k, l).abs();
            if (v > best) {
                best = v;
                arg = IndexPair{k, l};
            }
        });
        Verdict v = Verdict::holds_with(best, "finite support: exact sup");
        v.witness = arg;
        return v;
    }
    auto stat = [&x, mode](const Window& w) {
        StatSample s{Scalar::zero(mode), std::nullopt};
        x.support().for_each_in(w, [&](Index k, Index l) {
            Scalar v = x.eval(k, l).abs();
            if (!s.witness || v > s.value) {
                s.value = v;
                s.witness = IndexPair{k, l};
            }
        });
        return s;
    };
    return decide_monotone_stat(stat, mode, spec, "window sup");
}

// Pringsheim limit.
inline Verdict pringsheim_limit(const DoubleSequence& x, const LimitSpec& spec) {
    if (spec.mode != ThetaMode::p) throw Error("pringsheim_limit requires spec.mode = p");
    if (x.finite_support()) return Verdict::holds_with(Scalar::zero(x.mode()), "finite support: eventually zero");
    return convergence_detail::decide_pointwise_limit(x, spec, "p-limit");
}

// Bounded Pringsheim limit: p-limit plus a bounded sup.
inline Verdict bp_limit(const DoubleSequence& x, const LimitSpec& spec) {
    if (spec.mode != ThetaMode::bp) throw Error("bp_limit requires spec.mode = bp");
    if (x.finite_support()) return Verdict::holds_with(Scalar::zero(x.mode()), "finite support: eventually zero");
    Verdict p = convergence_detail::decide_pointwise_limit(x, spec, "p-limit");
    if (p.fails()) return p;
    Verdict s = sup_norm(x, spec);
    if (s.fails()) {
        Verdict v = Verdict::fails_at(s.witness.value_or(IndexPair{1, 1}), "unbounded: " + s.note, s.value);
        return v;
    }
    if (p.inconclusive() || s.inconclusive()) return p.inconclusive() ? p : s;
    return p;
}

// Regular limit: bp plus convergence of every row and column.
inline Verdict r_limit(const DoubleSequence& x, const LimitSpec& spec) {
    if (spec.mode != ThetaMode::r) throw Error("r_limit requires spec.mode = r");
    if (x.finite_support())
        return Verdict::holds_with(Scalar::zero(x.mode()), "finite support: eventually zero, rows and columns too");
    Verdict bp = bp_limit(x, spec.with_mode(ThetaMode::bp));
    if (bp.fails()) return bp;
    Verdict lines = convergence_detail::check_all_lines(x, spec);
    if (lines.fails()) return lines;
    if (bp.inconclusive() || lines.inconclusive()) return bp.inconclusive() ? bp : lines;
    return bp;
}

// Dispatch on the spec's mode.
inline Verdict theta_limit(const DoubleSequence& x, const LimitSpec& spec) {
    switch (spec.mode) {
        case ThetaMode::p: return pringsheim_limit(x, spec);
        case ThetaMode::bp: return bp_limit(x, spec);
        case ThetaMode::r: return r_limit(x, spec);
    }
    throw Error("bad theta mode");
}

// theta-sum of the double series over x: the theta-limit of the partial sums.
inline Verdict series_theta_sum(const DoubleSequence& x, const LimitSpec& spec) {
    if (x.finite_support()) {
        Window b = x.support_bound();
        Scalar total = b.rows == 0 ? Scalar::zero(x.mode()) : partial_sum(x, b.rows, b.cols);
        return Verdict::holds_with(total, "finite support: exact series sum");
    }
    DoubleSequence s = partial_sums_sequence(x);
    return theta_limit(s, spec);
}

}  // namespace hahn
