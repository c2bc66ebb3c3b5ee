#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ctgame/error.hpp"
#include "ctgame/price_path.hpp"

namespace ctgame {

/// Paths longer than this are Hölder-scanned on a coarsened grid plus all
/// adjacent fine pairs instead of all pairs.
inline constexpr std::size_t kExhaustiveHolderLimit = std::size_t{1} << 13;

/// Exhaustive max over all pairs i < j of |f_j - f_i| / (t_j - t_i)^h.
inline double max_holder_ratio_exhaustive(std::span<const double> t, std::span<const double> f, double h) {
    double best = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = i + 1; j < f.size(); ++j)
            best = std::max(best, std::abs(f[j] - f[i]) / std::pow(t[j] - t[i], h));
    return best;
}

/// Max Hölder ratio under the two-scale policy (exact below kExhaustiveHolderLimit points).
inline double max_holder_ratio(std::span<const double> t, std::span<const double> f, double h) {
    if (f.size() <= kExhaustiveHolderLimit) return max_holder_ratio_exhaustive(t, f, h);
    const std::size_t stride = (f.size() + kExhaustiveHolderLimit - 1) / kExhaustiveHolderLimit;
    std::vector<double> ct, cf;
    for (std::size_t i = 0; i < f.size(); i += stride) {
        ct.push_back(t[i]);
        cf.push_back(f[i]);
    }
    if (ct.back() != t.back()) {
        ct.push_back(t.back());
        cf.push_back(f.back());
    }
    double best = max_holder_ratio_exhaustive(ct, cf, h);
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        best = std::max(best, std::abs(f[i + 1] - f[i]) / std::pow(t[i + 1] - t[i], h));
    return best;
}

/// |log S(y) - log S(x)| <= C |y - x|^h for all grid pairs in [t_from, t_to].
inline bool in_event_upper(const PricePath& path, double h, double c, double t_from, double t_to) {
    if (!(h > 0.0) || !(c > 0.0)) throw ValidationError("in_event_upper: need h > 0 and C > 0");
    auto w = window(path, t_from, t_to);
    return max_holder_ratio(w.times, w.log_prices, h) <= c;
}

struct LowerEventOptions {
    std::vector<double> epsilons;  // empty: 2^-4 ... 2^-10 times the window length
    std::size_t anchors = 256;     // equispaced anchors in [t_from, t_to - eps]
};

/// Finite stand-in for the lower-jaggedness event: for every eps in the list and
/// every anchor x, some grid point y in (x, t_to] has |log S(y) - log S(x)| >= C eps^h
/// and |log S(y) - log S(x)| / (y - x)^h >= C.
inline bool in_event_lower(const PricePath& path, double h, double c, double t_from, double t_to,
                           LowerEventOptions opts = {}) {
    if (!(h > 0.0) || !(c > 0.0)) throw ValidationError("in_event_lower: need h > 0 and C > 0");
    if (opts.anchors == 0) throw ValidationError("in_event_lower: need at least one anchor");
    const double len = t_to - t_from;
    if (opts.epsilons.empty())
        for (int e = 4; e <= 10; ++e) opts.epsilons.push_back(std::ldexp(len, -e));
    auto w = window(path, t_from, t_to);
    for (double eps : opts.epsilons) {
        if (!(eps > 0.0) || eps >= len) throw ValidationError("in_event_lower: eps must lie in (0, T2-T1)");
        const double need = c * std::pow(eps, h);
        const double span_x = len - eps;
        for (std::size_t a = 0; a < opts.anchors; ++a) {
            const double x = opts.anchors == 1
                                 ? t_from
                                 : t_from + span_x * static_cast<double>(a) /
                                                static_cast<double>(opts.anchors - 1);
            const double fx = path.log_price_at(x);
            auto it = std::upper_bound(w.times.begin(), w.times.end(), x);
            bool found = false;
            for (auto k = static_cast<std::size_t>(it - w.times.begin()); k < w.times.size(); ++k) {
                const double d = std::abs(w.log_prices[k] - fx);
                if (d >= need && d / std::pow(w.times[k] - x, h) >= c) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
    }
    return true;
}

/// max log S - min log S <= A on [t_from, t_to] (closed inequality).
inline bool in_event_range(const PricePath& path, double a, double t_from, double t_to) {
    if (!(a > 0.0)) throw ValidationError("in_event_range: need A > 0");
    auto w = window(path, t_from, t_to);
    auto [lo, hi] = std::minmax_element(w.log_prices.begin(), w.log_prices.end());
    return *hi - *lo <= a;
}

/// First time after t_from at which |log S(t) - log S(t_from)| reaches `band`,
/// solved exactly on the interpolant. Empty if the band is never left before t_to.
inline std::optional<double> first_band_exit(const PricePath& path, double t_from, double t_to, double band) {
    if (!(band > 0.0)) throw ValidationError("first_band_exit: band must be > 0");
    auto w = window(path, t_from, t_to);
    const double f0 = w.log_prices.front();
    for (std::size_t i = 1; i < w.times.size(); ++i) {
        const double b = w.log_prices[i] - f0;
        if (std::abs(b) >= band) {
            const double a = w.log_prices[i - 1] - f0;
            const double target = b > 0 ? band : -band;
            const double tau = w.times[i - 1] + (target - a) / (b - a) * (w.times[i] - w.times[i - 1]);
            return std::clamp(tau, w.times[i - 1], w.times[i]);
        }
    }
    return std::nullopt;
}

}  // namespace ctgame
