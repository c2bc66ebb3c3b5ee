#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "ctgame/error.hpp"

namespace ctgame {

/// Sample quantile, linear interpolation between order statistics (type 7).
/// NaN entries are ignored; an empty sample gives NaN.
inline double quantile(std::span<const double> xs, double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile: q must lie in [0,1]");
    std::vector<double> v;
    v.reserve(xs.size());
    for (double x : xs)
        if (!std::isnan(x)) v.push_back(x);
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::span<const double> xs) { return quantile(xs, 0.5); }

}  // namespace ctgame
