#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>

#include "hahn/base.hpp"

namespace hahn {

// Conservative superset of the nonzero entries of a double sequence: a
// rectangle [row_lo..row_hi] x [col_lo..col_hi] (bounds may be kUnbounded)
// optionally intersected with the diagonal band |k - l| <= band. Entries
// outside the support are exactly zero; entries inside may still be zero.
//
// The descriptor is what lets window scans of row-, column-, and
// diagonal-supported sequences skip the quadratically many known zeros.
struct Support {
    Index row_lo = 1, row_hi = kUnbounded;
    Index col_lo = 1, col_hi = kUnbounded;
    std::optional<Index> band;

    static Support all() { return {}; }
    static Support none() { return rect(1, 0, 1, 0); }
    static Support rect(Index r1, Index r2, Index c1, Index c2) {
        Support s;
        s.row_lo = r1;
        s.row_hi = r2;
        s.col_lo = c1;
        s.col_hi = c2;
        return s;
    }
    static Support block(Index rows, Index cols) { return rect(1, rows, 1, cols); }
    static Support point(Index k, Index l) { return rect(k, k, l, l); }
    static Support row_range(Index r1, Index r2) { return rect(r1, r2, 1, kUnbounded); }
    static Support col_range(Index c1, Index c2) { return rect(1, kUnbounded, c1, c2); }
    static Support diagonal_band(Index width) {
        Support s;
        s.band = width;
        return s;
    }

    bool empty() const { return row_lo > row_hi || col_lo > col_hi; }

    bool contains(Index k, Index l) const {
        if (k < row_lo || k > row_hi || l < col_lo || l > col_hi) return false;
        if (band && (k > l ? k - l : l - k) > *band) return false;
        return true;
    }

    // Bounding box is finite when both axes are bounded, or when a band plus
    // one bounded axis pins the other.
    bool finite() const {
        if (empty()) return true;
        Index rh = row_hi, ch = col_hi;
        if (band) {
            rh = std::min(rh, ch == kUnbounded ? kUnbounded : ch + *band);
            ch = std::min(ch, rh == kUnbounded ? kUnbounded : rh + *band);
        }
        return rh < kUnbounded && ch < kUnbounded;
    }

    // Smallest window [1..M]x[1..N] containing the support; requires finite().
    Window bbox() const {
        if (empty()) return Window{0, 0};
        if (!finite()) throw Error("support is not finite");
        Index rh = row_hi, ch = col_hi;
        if (band) {
            if (ch < kUnbounded) rh = std::min(rh, ch + *band);
            if (rh < kUnbounded) ch = std::min(ch, rh + *band);
        }
        return Window{rh, ch};
    }

    // True when every cell of [r1..r2]x[c1..c2] lies inside the support.
    bool covers(Index r1, Index r2, Index c1, Index c2) const {
        if (r1 > r2 || c1 > c2) return true;
        if (r1 < row_lo || r2 > row_hi || c1 < col_lo || c2 > col_hi) return false;
        if (band) {
            Index spread = std::max(r2 > c1 ? r2 - c1 : c1 - r2, c2 > r1 ? c2 - r1 : r1 - c2);
            if (spread > *band) return false;
        }
        return true;
    }

    // Support of the forward differences: a reference to (k..k+dr, l..l+dc)
    // widens the region one step toward the origin and fattens the band.
    Support difference_hull(Index dr, Index dc) const {
        Support s = *this;
        if (s.empty()) return s;
        s.row_lo = std::max<Index>(1, s.row_lo - dr);
        s.col_lo = std::max<Index>(1, s.col_lo - dc);
        if (s.band) s.band = *s.band + std::max(dr, dc);
        return s;
    }

    static Support intersect(const Support& a, const Support& b) {
        Support s;
        s.row_lo = std::max(a.row_lo, b.row_lo);
        s.row_hi = std::min(a.row_hi, b.row_hi);
        s.col_lo = std::max(a.col_lo, b.col_lo);
        s.col_hi = std::min(a.col_hi, b.col_hi);
        if (a.band && b.band) s.band = std::min(*a.band, *b.band);
        else if (a.band) s.band = a.band;
        else if (b.band) s.band = b.band;
        return s;
    }

    static Support hull(const Support& a, const Support& b) {
        if (a.empty()) return b;
        if (b.empty()) return a;
        Support s;
        s.row_lo = std::min(a.row_lo, b.row_lo);
        s.row_hi = std::max(a.row_hi, b.row_hi);
        s.col_lo = std::min(a.col_lo, b.col_lo);
        s.col_hi = std::max(a.col_hi, b.col_hi);
        if (a.band && b.band) s.band = std::max(*a.band, *b.band);
        return s;  // a band only survives if both sides are banded
    }

    // Visit support ∩ [r1..r2]x[c1..c2] row by row.
    template <typename F>
    void for_each_in(Index r1, Index r2, Index c1, Index c2, F&& f) const {
        Index ra = std::max(r1, row_lo), rb = std::min(r2, row_hi);
        Index ca = std::max(c1, col_lo), cb = std::min(c2, col_hi);
        for (Index k = ra; k <= rb; ++k) {
            Index la = ca, lb = cb;
            if (band) {
                la = std::max(la, k - *band);
                lb = std::min(lb, k + *band);
            }
            for (Index l = la; l <= lb; ++l) f(k, l);
        }
    }

    template <typename F>
    void for_each_in(const Window& w, F&& f) const {
        for_each_in(1, w.rows, 1, w.cols, std::forward<F>(f));
    }

    std::uint64_t count_in(Index r1, Index r2, Index c1, Index c2) const {
        std::uint64_t n = 0;
        Index ra = std::max(r1, row_lo), rb = std::min(r2, row_hi);
        Index ca = std::max(c1, col_lo), cb = std::min(c2, col_hi);
        for (Index k = ra; k <= rb; ++k) {
            Index la = ca, lb = cb;
            if (band) {
                la = std::max(la, k - *band);
                lb = std::min(lb, k + *band);
            }
            if (lb >= la) n += static_cast<std::uint64_t>(lb - la + 1);
        }
        return n;
    }
};

}  // namespace hahn
