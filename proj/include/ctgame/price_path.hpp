#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ctgame/error.hpp"

namespace ctgame {

/// A positive continuous price path sampled on a strictly increasing time grid.
///
/// Between grid points the path is the linear interpolant of log-price, so
/// multiplicative price levels are crossed at closed-form times. The price
/// column is the canonical representation; log-prices are always `std::log`
/// of the stored prices, which makes text round trips bit-exact for both.
/// Immutable after construction.
class PricePath {
public:
    static PricePath from_prices(std::vector<double> times, std::vector<double> prices) {
        PricePath p;
        p.times_ = std::move(times);
        p.prices_ = std::move(prices);
        p.finish();
        return p;
    }

    static PricePath from_log_prices(std::vector<double> times, std::span<const double> log_prices) {
        std::vector<double> prices(log_prices.size());
        std::transform(log_prices.begin(), log_prices.end(), prices.begin(),
                       [](double lp) { return std::exp(lp); });
        return from_prices(std::move(times), std::move(prices));
    }

    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> prices() const noexcept { return prices_; }
    std::span<const double> log_prices() const noexcept { return log_prices_; }

    std::size_t size() const noexcept { return times_.size(); }
    double start_time() const noexcept { return times_.front(); }
    double horizon() const noexcept { return times_.back(); }

    /// Index j of the segment [times[j], times[j+1]] containing t (clamped to the grid).
    std::size_t segment_index(double t) const noexcept {
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        if (it == times_.begin()) return 0;
        auto j = static_cast<std::size_t>(it - times_.begin()) - 1;
        return std::min(j, times_.size() - 2);
    }

    /// Interpolated log-price at t; t is clamped to [start_time, horizon].
    double log_price_at(double t) const noexcept {
        if (t <= times_.front()) return log_prices_.front();
        if (t >= times_.back()) return log_prices_.back();
        std::size_t j = segment_index(t);
        if (t == times_[j]) return log_prices_[j];
        double w = (t - times_[j]) / (times_[j + 1] - times_[j]);
        return log_prices_[j] + w * (log_prices_[j + 1] - log_prices_[j]);
    }

    double price_at(double t) const noexcept { return std::exp(log_price_at(t)); }

    bool operator==(const PricePath&) const = default;

private:
    PricePath() = default;

    void finish() {
        if (times_.size() != prices_.size())
            throw ValidationError("price path: times and prices differ in length");
        if (times_.size() < 2) throw ValidationError("price path: need at least 2 grid points");
        if (times_.front() != 0.0) throw ValidationError("price path: times[0] must be 0");
        for (std::size_t i = 0; i < times_.size(); ++i) {
            if (!std::isfinite(times_[i]))
                throw ValidationError("price path: non-finite time at index " + std::to_string(i));
            if (i > 0 && !(times_[i] > times_[i - 1]))
                throw ValidationError("price path: times not strictly increasing at index " +
                                      std::to_string(i));
            if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i]))
                throw ValidationError("price path: price must be finite and positive at index " +
                                      std::to_string(i));
        }
        log_prices_.resize(prices_.size());
        std::transform(prices_.begin(), prices_.end(), log_prices_.begin(),
                       [](double s) { return std::log(s); });
    }

    std::vector<double> times_;
    std::vector<double> prices_;
    std::vector<double> log_prices_;
};

/// Grid points of `path` strictly inside (t_from, t_to), bracketed by the two
/// interpolated endpoints. The returned times/log-prices describe the same
/// piecewise-linear function restricted to the window.
struct PathWindow {
    std::vector<double> times;
    std::vector<double> log_prices;
};

inline PathWindow window(const PricePath& path, double t_from, double t_to) {
    if (!(t_from < t_to)) throw ValidationError("window: need t_from < t_to");
    if (t_from < path.start_time() || t_to > path.horizon())
        throw ValidationError("window: [t_from, t_to] outside the path horizon");
    PathWindow w;
    auto ts = path.times();
    auto lp = path.log_prices();
    w.times.push_back(t_from);
    w.log_prices.push_back(path.log_price_at(t_from));
    auto first = std::upper_bound(ts.begin(), ts.end(), t_from);
    for (auto it = first; it != ts.end() && *it < t_to; ++it) {
        auto i = static_cast<std::size_t>(it - ts.begin());
        w.times.push_back(ts[i]);
        w.log_prices.push_back(lp[i]);
    }
    w.times.push_back(t_to);
    w.log_prices.push_back(path.log_price_at(t_to));
    return w;
}

}  // namespace ctgame
