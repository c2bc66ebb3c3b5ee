#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ctgame/error.hpp"
#include "ctgame/price_path.hpp"

namespace ctgame {

/// Deepest dyadic level that still has distinct grid points: floor(log2(n - 1)).
inline int max_dyadic_depth(std::size_t n_points) {
    if (n_points < 2) return 0;
    return static_cast<int>(std::bit_width(n_points - 1)) - 1;
}

/// Sum of |f(s_i) - f(s_{i-1})|^p over the division into 2^depth index-equal pieces.
inline double dyadic_sum(std::span<const double> f, double p, int depth) {
    if (f.size() < 2) return 0.0;
    if (depth < 0 || depth > max_dyadic_depth(f.size()))
        throw ValidationError("dyadic_sum: depth exceeds the grid resolution");
    const std::size_t pieces = std::size_t{1} << depth;
    const std::size_t segs = f.size() - 1;
    double s = 0.0;
    std::size_t prev = 0;
    for (std::size_t i = 1; i <= pieces; ++i) {
        const std::size_t idx = (i * segs) >> depth;
        s += std::pow(std::abs(f[idx] - f[prev]), p);
        prev = idx;
    }
    return s;
}

/// Division through the local extrema of the sampled function, then greedily
/// coarsened: a run a-b-c-d collapses to a-d whenever that does not lower the
/// p-th power sum. Optimal for p = 1.
inline double extrema_division_sum(std::span<const double> f, double p) {
    if (f.size() < 2) return 0.0;
    std::vector<double> pts;
    pts.push_back(f.front());
    int dir = 0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        const double d = f[i] - pts.back();
        if (d == 0.0) continue;
        const int nd = d > 0 ? 1 : -1;
        if (nd == dir) pts.back() = f[i];  // monotone run continues
        else pts.push_back(f[i]);
        dir = nd;
    }
    auto pw = [p](double x) { return std::pow(std::abs(x), p); };
    if (p > 1.0) {
        std::vector<double> st;
        st.reserve(pts.size());
        for (double v : pts) {
            st.push_back(v);
            while (st.size() >= 4) {
                const auto n = st.size();
                const double a = st[n - 4], b = st[n - 3], c = st[n - 2], d = st[n - 1];
                if (pw(d - a) >= pw(b - a) + pw(c - b) + pw(d - c)) {
                    st[n - 3] = d;
                    st.resize(n - 2);
                } else {
                    break;
                }
            }
        }
        pts.swap(st);
    }
    double s = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) s += pw(pts[i] - pts[i - 1]);
    return s;
}

/// Lower-bound estimate of the strong p-variation sup over all divisions.
struct PVariationEstimate {
    double p = 1.0;
    std::vector<double> dyadic_sums;  // index = depth, 0..max_depth
    double dyadic_sup = 0.0;          // max over the dyadic sums
    double extrema_sum = 0.0;
    double estimate = 0.0;            // max of everything above

    /// Running maximum of the dyadic family up to `depth` (nondecreasing in depth).
    double dyadic_sup_to(int depth) const {
        double m = 0.0;
        for (int d = 0; d <= depth && d < static_cast<int>(dyadic_sums.size()); ++d)
            m = std::max(m, dyadic_sums[static_cast<std::size_t>(d)]);
        return m;
    }
};

inline PVariationEstimate p_variation(std::span<const double> f, double p, int max_depth = -1) {
    if (!(p >= 1.0)) throw DomainError("p_variation: p must be >= 1");
    PVariationEstimate est;
    est.p = p;
    const int deepest = max_dyadic_depth(f.size());
    const int depth = max_depth < 0 ? deepest : std::min(max_depth, deepest);
    for (int d = 0; d <= depth; ++d) est.dyadic_sums.push_back(dyadic_sum(f, p, d));
    est.dyadic_sup = est.dyadic_sup_to(depth);
    est.extrema_sum = extrema_division_sum(f, p);
    est.estimate = std::max(est.dyadic_sup, est.extrema_sum);
    return est;
}

inline PVariationEstimate p_variation(const PricePath& path, double t_from, double t_to, double p,
                                      int max_depth = -1) {
    auto w = window(path, t_from, t_to);
    return p_variation(w.log_prices, p, max_depth);
}

struct VariationReport {
    std::vector<double> p_grid;
    std::vector<double> estimates;  // p_variation(...).estimate per p
    std::vector<double> slopes;     // d log2(dyadic sum) / d depth per p
    double vex = 1.0;
    double holder = 1.0;  // 1 / vex
};

struct VexOptions {
    std::vector<double> p_grid;  // ascending, >= 1; empty = 1.00, 1.05, ..., 4.00
    int min_depth = -1;          // default: max_depth - 8 (at least 1)
    int max_depth = -1;          // default: deepest level of the grid
};

/// Variation exponent: the p at which the dyadic p-sums stop growing with depth.
/// Per p, the sums' log2 is regressed on depth; the estimate is the first zero
/// crossing of that slope (linear interpolation on the p grid). A constant
/// function yields 1; slopes positive on the whole grid yield +infinity.
inline VariationReport vex_estimate(std::span<const double> f, VexOptions opts = {}) {
    VariationReport rep;
    if (opts.p_grid.empty())
        for (int i = 0; i <= 60; ++i) opts.p_grid.push_back(1.0 + 0.05 * i);
    rep.p_grid = opts.p_grid;
    const int deepest = max_dyadic_depth(f.size());
    const int hi = opts.max_depth < 0 ? deepest : std::min(opts.max_depth, deepest);
    const int lo = opts.min_depth < 0 ? std::max(1, hi - 8) : std::min(opts.min_depth, hi);

    bool constant = std::all_of(f.begin(), f.end(), [&](double v) { return v == f.front(); });
    for (double p : rep.p_grid) {
        rep.estimates.push_back(p_variation(f, p, hi).estimate);
        if (constant || hi - lo < 1) {
            rep.slopes.push_back(0.0);
            continue;
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int d = lo; d <= hi; ++d) {
            const double y = std::log2(dyadic_sum(f, p, d));
            sx += d;
            sy += y;
            sxx += static_cast<double>(d) * d;
            sxy += d * y;
            ++m;
        }
        rep.slopes.push_back((m * sxy - sx * sy) / (m * sxx - sx * sx));
    }
    if (constant) {
        rep.vex = 1.0;
    } else {
        rep.vex = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rep.slopes.size(); ++i) {
            if (rep.slopes[i] <= 0.0) {
                if (i == 0) {
                    rep.vex = rep.p_grid[0];
                } else {
                    const double s0 = rep.slopes[i - 1], s1 = rep.slopes[i];
                    rep.vex = rep.p_grid[i - 1] + (rep.p_grid[i] - rep.p_grid[i - 1]) * s0 / (s0 - s1);
                }
                break;
            }
        }
        rep.vex = std::max(rep.vex, 1.0);
    }
    rep.holder = 1.0 / rep.vex;
    return rep;
}

inline VariationReport vex_estimate(const PricePath& path, double t_from, double t_to, VexOptions opts = {}) {
    auto w = window(path, t_from, t_to);
    return vex_estimate(w.log_prices, std::move(opts));
}

}  // namespace ctgame
