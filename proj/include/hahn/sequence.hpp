#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "hahn/base.hpp"
#include "hahn/expr.hpp"
#include "hahn/scalar.hpp"
#include "hahn/support.hpp"

namespace hahn {

// An evaluable map (k,l) in N²(>=1) -> Scalar. Immutable after construction;
// eval is pure, so values may be evaluated concurrently and transforms are
// lazy wrappers. Known structure (finite grids, single rows/columns, diagonal
// bands) is tracked through a Support descriptor so that window scans touch
// only cells that can be nonzero.
class DoubleSequence {
public:
    Scalar eval(Index k, Index l) const {
        if (k < 1 || l < 1) throw Error("sequence index out of range: (" + std::to_string(k) + "," + std::to_string(l) + ")");
        if (!impl_->supp.contains(k, l)) return Scalar::zero(impl_->mode);
        return impl_->fn(k, l);
    }

    ValueMode mode() const { return impl_->mode; }
    const Support& support() const { return impl_->supp; }
    bool finite_support() const { return impl_->supp.finite(); }
    Window support_bound() const { return impl_->supp.bbox(); }
    const std::string& description() const { return impl_->desc; }

    // -- factories ----------------------------------------------------------

    static DoubleSequence from_fn(std::function<Scalar(Index, Index)> fn, ValueMode mode, Support supp,
                                  std::string desc) {
        return DoubleSequence(std::make_shared<Impl>(Impl{mode, std::move(supp), std::move(fn), std::move(desc)}));
    }

    static DoubleSequence zero(ValueMode mode) {
        return from_fn([mode](Index, Index) { return Scalar::zero(mode); }, mode, Support::none(), "0");
    }

    // e: all terms 1.
    static DoubleSequence ones(ValueMode mode) {
        return from_fn([mode](Index, Index) { return Scalar::one(mode); }, mode, Support::all(), "e");
    }

    // e_k: row k0 is 1, the rest 0.
    static DoubleSequence unit_row(Index k0, ValueMode mode) {
        require_positive(k0, "e_row index");
        return from_fn([mode](Index, Index) { return Scalar::one(mode); }, mode, Support::row_range(k0, k0),
                       "e_row(" + std::to_string(k0) + ")");
    }

    // e^l: column l0 is 1, the rest 0.
    static DoubleSequence unit_col(Index l0, ValueMode mode) {
        require_positive(l0, "e_col index");
        return from_fn([mode](Index, Index) { return Scalar::one(mode); }, mode, Support::col_range(l0, l0),
                       "e_col(" + std::to_string(l0) + ")");
    }

    // e^{kl}: single 1 at (k0,l0).
    static DoubleSequence unit(Index k0, Index l0, ValueMode mode) {
        require_positive(k0, "e_unit row");
        require_positive(l0, "e_unit column");
        return from_fn([mode](Index, Index) { return Scalar::one(mode); }, mode, Support::point(k0, l0),
                       "e_unit(" + std::to_string(k0) + "," + std::to_string(l0) + ")");
    }

    // Section of ones e^{[m,n]}: 1 on [1..m]x[1..n].
    static DoubleSequence block(Index m, Index n, ValueMode mode) {
        require_positive(m, "e_block rows");
        require_positive(n, "e_block cols");
        return from_fn([mode](Index, Index) { return Scalar::one(mode); }, mode, Support::block(m, n),
                       "e_block(" + std::to_string(m) + "," + std::to_string(n) + ")");
    }

    // Finite grid with origin (1,1); zero outside.
    static DoubleSequence from_grid(std::vector<std::vector<Scalar>> rows) {
        if (rows.empty() || rows[0].empty()) throw Error("grid must have at least one row and one column");
        ValueMode mode = rows[0][0].mode();
        for (const auto& r : rows) {
            if (r.size() != rows[0].size()) throw Error("grid rows must all have the same length");
            for (const auto& v : r)
                if (v.mode() != mode) throw ModeMismatchError("grid mixes rational and float entries");
        }
        auto grid = std::make_shared<const std::vector<std::vector<Scalar>>>(std::move(rows));
        Index m = static_cast<Index>(grid->size());
        Index n = static_cast<Index>((*grid)[0].size());
        return from_fn(
            [grid, mode](Index k, Index l) -> Scalar {
                return (*grid)[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(l - 1)];
            },
            mode, Support::block(m, n), "grid(" + std::to_string(m) + "x" + std::to_string(n) + ")");
    }

    static DoubleSequence closed_form(const expr::Piecewise& pw, ValueMode mode) {
        if (pw.vars != expr::VarSet::sequence) throw Error("sequence closed form must use variables k, l only");
        auto shared = std::make_shared<const expr::Piecewise>(pw);
        return from_fn(
            [shared, mode](Index k, Index l) { return expr::eval(*shared, mode, expr::Assignment{k, l, 0, 0}); },
            mode, infer_support(pw), expr::to_string(pw));
    }

    static DoubleSequence closed_form(std::string_view text, ValueMode mode) {
        return closed_form(expr::parse(text, expr::VarSet::sequence), mode);
    }

    // Guard analysis: pieces guarded by k==c / l==c / k==l (and conjunctions
    // or disjunctions of those) with a literal-zero default let window scans
    // skip the rest of the plane. Anything unrecognized degrades to full
    // support, which is always sound.
    static Support infer_support(const expr::Piecewise& pw);

private:
    struct Impl {
        ValueMode mode;
        Support supp;
        std::function<Scalar(Index, Index)> fn;
        std::string desc;
    };
    explicit DoubleSequence(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    static void require_positive(Index v, const char* what) {
        if (v < 1) throw Error(std::string(what) + " must be >= 1");
    }
    std::shared_ptr<const Impl> impl_;
};

namespace detail {

inline bool is_zero_node(const expr::NodePtr& n) {
    return n && n->kind == expr::Node::Kind::constant && n->value.is_zero();
}

inline std::optional<Index> constant_index(const expr::NodePtr& n) {
    if (!n || n->kind != expr::Node::Kind::constant) return std::nullopt;
    const Rational& r = n->value;
    if (denominator(r) != 1 || r < 0) return std::nullopt;
    return numerator(r).convert_to<Index>();
}

// Region implied by a guard, or nullopt when the guard shape is unrecognized.
inline std::optional<Support> guard_region(const expr::CondPtr& c) {
    using expr::Cond;
    using expr::Node;
    switch (c->kind) {
        case Cond::Kind::always: return Support::all();
        case Cond::Kind::conj: {
            auto a = guard_region(c->a), b = guard_region(c->b);
            if (!a || !b) return std::nullopt;
            return Support::intersect(*a, *b);
        }
        case Cond::Kind::disj: {
            auto a = guard_region(c->a), b = guard_region(c->b);
            if (!a || !b) return std::nullopt;
            return Support::hull(*a, *b);
        }
        case Cond::Kind::cmp: {
            const auto& l = c->lhs;
            const auto& r = c->rhs;
            bool lv = l->kind == Node::Kind::variable, rv = r->kind == Node::Kind::variable;
            if (lv && rv && c->op == Cond::Op::eq && ((l->var == 'k' && r->var == 'l') || (l->var == 'l' && r->var == 'k')))
                return Support::diagonal_band(0);
            if (lv && !rv) {
                auto cst = constant_index(r);
                if (!cst) return std::nullopt;
                char v = l->var;
                Index lo = 1, hi = kUnbounded;
                switch (c->op) {
                    case Cond::Op::eq: lo = hi = *cst; break;
                    case Cond::Op::le: hi = *cst; break;
                    case Cond::Op::lt: hi = *cst - 1; break;
                    case Cond::Op::ge: lo = *cst; break;
                    case Cond::Op::gt: lo = *cst + 1; break;
                }
                if (v == 'k') return Support::rect(lo, hi, 1, kUnbounded);
                if (v == 'l') return Support::rect(1, kUnbounded, lo, hi);
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace detail

inline Support DoubleSequence::infer_support(const expr::Piecewise& pw) {
    // The default (last) piece must be literal zero; otherwise the sequence
    // can be nonzero anywhere.
    if (!detail::is_zero_node(pw.pieces.back().value)) return Support::all();
    Support acc = Support::none();
    for (std::size_t i = 0; i + 1 < pw.pieces.size(); ++i) {
        const auto& p = pw.pieces[i];
        if (detail::is_zero_node(p.value)) continue;
        auto region = detail::guard_region(p.cond);
        if (!region) return Support::all();
        acc = Support::hull(acc, *region);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// elementary transforms

// 4D forward difference: (Δx)_{kl} = x_{kl} - x_{k+1,l} - x_{k,l+1} + x_{k+1,l+1}.
inline DoubleSequence delta11(const DoubleSequence& x) {
    return DoubleSequence::from_fn(
        [x](Index k, Index l) {
            return x.eval(k, l) - x.eval(k + 1, l) - x.eval(k, l + 1) + x.eval(k + 1, l + 1);
        },
        x.mode(), x.support().difference_hull(1, 1), "delta11(" + x.description() + ")");
}

// Row difference: x_{kl} - x_{k+1,l}.
inline DoubleSequence delta10(const DoubleSequence& x) {
    return DoubleSequence::from_fn([x](Index k, Index l) { return x.eval(k, l) - x.eval(k + 1, l); }, x.mode(),
                                   x.support().difference_hull(1, 0), "delta10(" + x.description() + ")");
}

// Column difference: x_{kl} - x_{k,l+1}.
inline DoubleSequence delta01(const DoubleSequence& x) {
    return DoubleSequence::from_fn([x](Index k, Index l) { return x.eval(k, l) - x.eval(k, l + 1); }, x.mode(),
                                   x.support().difference_hull(0, 1), "delta01(" + x.description() + ")");
}

// x^{[m,n]}: x on [1..m]x[1..n], zero elsewhere. Always finite support.
inline DoubleSequence section(const DoubleSequence& x, Index m, Index n) {
    if (m < 1 || n < 1) throw Error("section bounds must be >= 1");
    Support supp = Support::intersect(x.support(), Support::block(m, n));
    return DoubleSequence::from_fn([x, m, n](Index k, Index l) { return x.eval(k, l); }, x.mode(), supp,
                                   "section(" + x.description() + "," + std::to_string(m) + "," + std::to_string(n) + ")");
}

// (kl * x_{kl}).
inline DoubleSequence integrate(const DoubleSequence& x) {
    return DoubleSequence::from_fn([x](Index k, Index l) { return x.eval(k, l) * (k * l); }, x.mode(), x.support(),
                                   "integrate(" + x.description() + ")");
}

// (x_{kl} / (kl)).
inline DoubleSequence differentiate(const DoubleSequence& x) {
    return DoubleSequence::from_fn([x](Index k, Index l) { return x.eval(k, l) / (k * l); }, x.mode(), x.support(),
                                   "differentiate(" + x.description() + ")");
}

// y_{kl} = kl * (Δx)_{kl}; the coefficient sequence of x in the Hahn space.
inline DoubleSequence hahn_coefficients(const DoubleSequence& x) {
    DoubleSequence y = integrate(delta11(x));
    return DoubleSequence::from_fn([y](Index k, Index l) { return y.eval(k, l); }, y.mode(), y.support(),
                                   "hahn_coefficients(" + x.description() + ")");
}

inline DoubleSequence scale(const DoubleSequence& x, const Scalar& c) {
    if (c.mode() != x.mode()) throw ModeMismatchError("scaling constant mode differs from sequence mode");
    Support supp = c.is_zero() ? Support::none() : x.support();
    return DoubleSequence::from_fn([x, c](Index k, Index l) { return c * x.eval(k, l); }, x.mode(), supp,
                                   "scale(" + x.description() + ")");
}

inline DoubleSequence add(const DoubleSequence& a, const DoubleSequence& b) {
    if (a.mode() != b.mode()) throw ModeMismatchError("cannot add sequences of different modes");
    return DoubleSequence::from_fn([a, b](Index k, Index l) { return a.eval(k, l) + b.eval(k, l); }, a.mode(),
                                   Support::hull(a.support(), b.support()), "(" + a.description() + " + " + b.description() + ")");
}

inline DoubleSequence pointwise_product(const DoubleSequence& a, const DoubleSequence& b) {
    if (a.mode() != b.mode()) throw ModeMismatchError("cannot multiply sequences of different modes");
    return DoubleSequence::from_fn([a, b](Index k, Index l) { return a.eval(k, l) * b.eval(k, l); }, a.mode(),
                                   Support::intersect(a.support(), b.support()),
                                   "(" + a.description() + " * " + b.description() + ")");
}

inline DoubleSequence abs_sequence(const DoubleSequence& x) {
    return DoubleSequence::from_fn([x](Index k, Index l) { return x.eval(k, l).abs(); }, x.mode(), x.support(),
                                   "abs(" + x.description() + ")");
}

// ---------------------------------------------------------------------------
// rectangular sums

// s_{mn} = sum over [1..m]x[1..n]; support-aware direct enumeration.
inline Scalar partial_sum(const DoubleSequence& x, Index m, Index n) {
    if (m < 1 || n < 1) throw Error("partial_sum bounds must be >= 1");
    Scalar acc = Scalar::zero(x.mode());
    x.support().for_each_in(1, m, 1, n, [&](Index k, Index l) { acc += x.eval(k, l); });
    return acc;
}

// Residual of the double series past the corner [1..m]x[1..n], truncated to
// the window: the three tail regions are summed separately.
inline Scalar residual(const DoubleSequence& x, Index m, Index n, const Window& w) {
    if (w.rows < m || w.cols < n) throw WindowError("residual window must contain the corner (m,n)");
    Scalar acc = Scalar::zero(x.mode());
    const Support& s = x.support();
    s.for_each_in(m + 1, w.rows, 1, n, [&](Index k, Index l) { acc += x.eval(k, l); });          // below the corner
    s.for_each_in(1, m, n + 1, w.cols, [&](Index k, Index l) { acc += x.eval(k, l); });          // right of the corner
    s.for_each_in(m + 1, w.rows, n + 1, w.cols, [&](Index k, Index l) { acc += x.eval(k, l); }); // outer quadrant
    return acc;
}

// Memoized rectangular prefix sums of a sequence. The storage strategy
// follows the support: thin row/column ranges keep per-line cumulative sums,
// diagonal bands keep per-diagonal ones, everything else a dense table grown
// on demand. Thread-safe; the underlying sequence is pure.
class PartialSums {
public:
    explicit PartialSums(DoubleSequence x) : st_(std::make_shared<State>(std::move(x))) {}

    // s_{mn}; m or n equal to 0 gives 0.
    Scalar at(Index m, Index n) const {
        if (m <= 0 || n <= 0) return Scalar::zero(st_->x.mode());
        std::lock_guard<std::mutex> lock(st_->mu);
        const Support& s = st_->x.support();
        if (s.empty()) return Scalar::zero(st_->x.mode());
        if (s.finite()) {
            Window b = s.bbox();
            ensure_dense(std::min(m, b.rows), std::min(n, b.cols), b.rows, b.cols);
            return dense_at(std::min(m, b.rows), std::min(n, b.cols));
        }
        constexpr Index kThinLimit = 64;
        if (s.row_hi < kUnbounded && s.row_hi - s.row_lo + 1 <= kThinLimit && !s.band) return thin_rows(m, n);
        if (s.col_hi < kUnbounded && s.col_hi - s.col_lo + 1 <= kThinLimit && !s.band) return thin_cols(m, n);
        if (s.band && *s.band <= kThinLimit) return banded(m, n);
        ensure_dense(m, n, kUnbounded, kUnbounded);
        return dense_at(m, n);
    }

    const DoubleSequence& source() const { return st_->x; }

private:
    struct State {
        explicit State(DoubleSequence seq) : x(std::move(seq)) {}
        DoubleSequence x;
        std::mutex mu;
        // dense prefix table, 1-based; table[i][j] = s_{ij}
        std::vector<std::vector<Scalar>> dense;
        Index dense_rows = 0, dense_cols = 0;
        // per-line cumulative sums for thin supports
        std::map<Index, std::vector<Scalar>> lines;
    };

    std::shared_ptr<State> st_;

    Scalar dense_at(Index m, Index n) const { return st_->dense[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)]; }

    void ensure_dense(Index m, Index n, Index cap_rows, Index cap_cols) const {
        State& st = *st_;
        Index want_r = std::min(std::max(m, st.dense_rows), cap_rows);
        Index want_c = std::min(std::max(n, st.dense_cols), cap_cols);
        if (want_r <= st.dense_rows && want_c <= st.dense_cols) return;
        ValueMode mode = st.x.mode();
        std::vector<std::vector<Scalar>> fresh(static_cast<std::size_t>(want_r) + 1,
                                               std::vector<Scalar>(static_cast<std::size_t>(want_c) + 1, Scalar::zero(mode)));
        for (Index i = 1; i <= want_r; ++i) {
            Scalar rowacc = Scalar::zero(mode);
            for (Index j = 1; j <= want_c; ++j) {
                rowacc += st.x.eval(i, j);
                fresh[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    fresh[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(j)] + rowacc;
            }
        }
        st.dense = std::move(fresh);
        st.dense_rows = want_r;
        st.dense_cols = want_c;
    }

    // cumulative sum along line `key`; horizontal lines keyed by row, vertical
    // by ~col (distinct key spaces never mix within one PartialSums)
    const Scalar& line_cum(Index key, Index upto, bool horizontal, Index line_index) const {
        State& st = *st_;
        auto& vec = st.lines[key];
        ValueMode mode = st.x.mode();
        if (vec.empty()) vec.push_back(Scalar::zero(mode));
        while (static_cast<Index>(vec.size()) <= upto) {
            Index t = static_cast<Index>(vec.size());
            Scalar v = horizontal ? st.x.eval(line_index, t) : st.x.eval(t, line_index);
            vec.push_back(vec.back() + v);
        }
        return vec[static_cast<std::size_t>(upto)];
    }

    Scalar thin_rows(Index m, Index n) const {
        const Support& s = st_->x.support();
        Scalar acc = Scalar::zero(st_->x.mode());
        Index hi_col = std::min(n, s.col_hi);
        if (hi_col < 1) return acc;
        for (Index r = s.row_lo; r <= std::min(m, s.row_hi); ++r) acc += line_cum(r, hi_col, true, r);
        return acc;
    }

    Scalar thin_cols(Index m, Index n) const {
        const Support& s = st_->x.support();
        Scalar acc = Scalar::zero(st_->x.mode());
        Index hi_row = std::min(m, s.row_hi);
        if (hi_row < 1) return acc;
        for (Index c = s.col_lo; c <= std::min(n, s.col_hi); ++c) acc += line_cum(~c, hi_row, false, c);
        return acc;
    }

    Scalar banded(Index m, Index n) const {
        const Support& s = st_->x.support();
        Index w = *s.band;
        Scalar acc = Scalar::zero(st_->x.mode());
        // diagonal offset d = l - k; cumulative over k along each diagonal,
        // keyed clear of the row/col key spaces
        for (Index d = -w; d <= w; ++d) {
            Index kmax = std::min({m, n - d, s.row_hi, s.col_hi == kUnbounded ? kUnbounded : s.col_hi - d});
            Index kmin = std::max<Index>({1, 1 - d, s.row_lo});
            if (kmax < kmin) continue;
            State& st = *st_;
            Index key = (kUnbounded / 2) + d;
            auto& vec = st.lines[key];
            ValueMode mode = st.x.mode();
            if (vec.empty()) vec.push_back(Scalar::zero(mode));
            while (static_cast<Index>(vec.size()) <= kmax) {
                Index t = static_cast<Index>(vec.size());
                Scalar v = (t >= kmin && t + d >= 1) ? st.x.eval(t, t + d) : Scalar::zero(mode);
                vec.push_back(vec.back() + v);
            }
            acc += vec[static_cast<std::size_t>(kmax)] - vec[static_cast<std::size_t>(kmin - 1)];
        }
        return acc;
    }
};

// The partial-sum sequence (s_{mn}) as a DoubleSequence, memoized.
inline DoubleSequence partial_sums_sequence(const DoubleSequence& x) {
    PartialSums ps(x);
    Support supp = x.support().empty() ? Support::none() : Support::rect(x.support().row_lo, kUnbounded, x.support().col_lo, kUnbounded);
    return DoubleSequence::from_fn([ps](Index m, Index n) { return ps.at(m, n); }, x.mode(), supp,
                                   "partial_sums(" + x.description() + ")");
}

// Corner averages s_{mn}/(mn); this is the T-transform of x.
inline DoubleSequence corner_averages(const DoubleSequence& x) {
    PartialSums ps(x);
    Support supp = x.support().empty() ? Support::none() : Support::rect(x.support().row_lo, kUnbounded, x.support().col_lo, kUnbounded);
    return DoubleSequence::from_fn([ps](Index m, Index n) { return ps.at(m, n) / (m * n); }, x.mode(), supp,
                                   "corner_averages(" + x.description() + ")");
}

}  // namespace hahn
