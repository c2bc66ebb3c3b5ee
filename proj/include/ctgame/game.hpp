#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ctgame/error.hpp"
#include "ctgame/path_io.hpp"
#include "ctgame/price_path.hpp"
#include "ctgame/strategy.hpp"

namespace ctgame {

/// Multiplicative limit-order thresholds: the next trade happens when the price
/// ratio first reaches 1 + delta_up or 1 / (1 + delta_down). The log-space
/// widths eta = log(1 + delta) are kept alongside.
class GridParams {
public:
    static GridParams from_deltas(double delta_up, double delta_down) {
        check_positive(delta_up, delta_down);
        return {delta_up, delta_down, std::log1p(delta_up), std::log1p(delta_down)};
    }

    static GridParams from_etas(double eta_up, double eta_down) {
        check_positive(eta_up, eta_down);
        return {std::expm1(eta_up), std::expm1(eta_down), eta_up, eta_down};
    }

    /// Scale-k grid of the multiscale ladder: eta_up = a_up^{-k}, eta_down = a_down^{-k}.
    static GridParams at_scale(double a_up, double a_down, int k) {
        if (!(a_up > 1.0) || !(a_down > 1.0)) throw ValidationError("grid: scale bases must be > 1");
        return from_etas(std::pow(a_up, -k), std::pow(a_down, -k));
    }

    double delta_up() const noexcept { return delta_up_; }
    double delta_down() const noexcept { return delta_down_; }
    double eta_up() const noexcept { return eta_up_; }
    double eta_down() const noexcept { return eta_down_; }

private:
    GridParams(double du, double dd, double eu, double ed)
        : delta_up_(du), delta_down_(dd), eta_up_(eu), eta_down_(ed) {}

    static void check_positive(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
            throw ValidationError("grid: thresholds must be finite and > 0");
    }

    double delta_up_, delta_down_, eta_up_, eta_down_;
};

/// Risk-neutral head probability: solves 1 = rho (1 + d1) + (1 - rho) / (1 + d2).
inline double risk_neutral_rho(const GridParams& g) noexcept {
    const double d1 = g.delta_up();
    const double d2 = g.delta_down();
    return d2 / (d1 + d2 + d1 * d2);
}

/// Return exposure theta (fraction of capital held in the asset) that realises bet nu.
inline double exposure_from_bet(double nu, const GridParams& g) noexcept {
    const double d1 = g.delta_up();
    const double d2 = g.delta_down();
    return (1.0 + d2) / (d1 + d2 + d1 * d2) * nu;
}

/// Realised stopping times of the limit-order scheme on [start_time, horizon].
struct HitSequence {
    double start_time = 0.0;
    double horizon = 0.0;
    double start_log_price = 0.0;
    std::vector<double> times;
    std::vector<Outcome> outcomes;
    std::vector<double> log_prices;  // boundary level reached at each hit
    bool truncated = false;          // round budget exhausted before the horizon

    std::size_t rounds() const noexcept { return times.size(); }

    /// Log-price level at the start of round i+1 (i = 0 is the entry point).
    double level(std::size_t i) const noexcept { return i == 0 ? start_log_price : log_prices[i - 1]; }
    double time(std::size_t i) const noexcept { return i == 0 ? start_time : times[i - 1]; }
};

struct ScanOptions {
    std::size_t max_rounds = std::numeric_limits<std::size_t>::max();
};

namespace detail {
// An endpoint within a few ulps of a boundary counts as landing on it.
inline double level_tolerance(double level) noexcept {
    return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(level));
}
}  // namespace detail

/// Scans the piecewise log-linear path for successive exits of the corridor
/// (level - eta_down, level + eta_up). Each crossing time is solved exactly on
/// its segment; the recorded log-price is the boundary level itself. A hit at
/// exactly t_to is a completed round.
inline HitSequence scan_hits(const PricePath& path, const GridParams& grid, double t_from, double t_to,
                             ScanOptions opts = {}) {
    if (!(t_from < t_to)) throw ValidationError("scan_hits: need t_from < t_to");
    if (t_from < path.start_time() || t_to > path.horizon())
        throw ValidationError("scan_hits: window outside the path horizon");

    HitSequence hits;
    hits.start_time = t_from;
    hits.horizon = t_to;
    hits.start_log_price = path.log_price_at(t_from);

    const auto ts = path.times();
    const auto lp = path.log_prices();
    const double eta_up = grid.eta_up();
    const double eta_down = grid.eta_down();

    double level = hits.start_log_price;
    double cur_t = t_from;
    double cur_v = level;
    std::size_t j = path.segment_index(t_from);

    for (; j + 1 < ts.size() && ts[j] < t_to; ++j) {
        const double end_t = ts[j + 1];
        const double end_v = lp[j + 1];
        for (;;) {
            const double up = level + eta_up;
            const double down = level - eta_down;
            Outcome x;
            double target;
            if (end_v >= up - detail::level_tolerance(up)) {
                x = Outcome::up;
                target = up;
            } else if (end_v <= down + detail::level_tolerance(down)) {
                x = Outcome::down;
                target = down;
            } else {
                break;
            }
            double tau = end_t;
            const double rise = end_v - cur_v;
            if ((x == Outcome::up && end_v > up) || (x == Outcome::down && end_v < down))
                tau = cur_t + (target - cur_v) / rise * (end_t - cur_t);
            tau = std::clamp(tau, cur_t, end_t);
            if (tau > t_to) return hits;
            if (hits.rounds() == opts.max_rounds) {
                hits.truncated = true;
                return hits;
            }
            hits.times.push_back(tau);
            hits.outcomes.push_back(x);
            hits.log_prices.push_back(target);
            level = target;
            cur_t = tau;
            cur_v = target;
        }
        cur_t = end_t;
        cur_v = end_v;
    }
    return hits;
}

/// Classifies a realised price ratio as the up (1) or down (0) boundary.
/// Relative tolerance 1e-9 on the ratio.
inline Outcome encode_outcome(double s_prev, double s_next, const GridParams& grid) {
    const double ratio = s_next / s_prev;
    constexpr double tol = 1e-9;
    if (std::abs(ratio / (1.0 + grid.delta_up()) - 1.0) <= tol) return Outcome::up;
    if (std::abs(ratio * (1.0 + grid.delta_down()) - 1.0) <= tol) return Outcome::down;
    throw InconsistencyError("encode_outcome: price ratio " + format_double(ratio) +
                             " matches neither boundary");
}

/// A bet policy sees the outcomes of completed rounds (and their counts) only.
template <class P>
concept BetPolicy = requires(P& p, std::span<const Outcome> history, const Counts& c) {
    { p(history, c) } -> std::convertible_to<double>;
};

/// Per-round and horizon capital of one strategy in one embedded game.
/// Capitals are stored as natural logs (ruin is -infinity).
struct CapitalTrajectory {
    std::vector<double> log_capital;  // K_0 = 1, K_1, ..., K_n at the trade times
    std::vector<double> bets;         // nu_1..nu_n
    std::vector<double> exposures;    // theta_1..theta_n (filled by continuous_capital)
    double open_bet = 0.0;            // nu_{n+1}, the position still open at the horizon
    double open_exposure = 0.0;
    double open_factor = 1.0;
    double horizon = 0.0;
    double log_capital_at_horizon = 0.0;
    std::vector<double> sample_times;
    std::vector<double> sample_log_capital;

    std::size_t rounds() const noexcept { return bets.size(); }
};

inline void check_bet_window(double nu, double rho, std::size_t round) {
    if (!(nu >= -1.0 / (1.0 - rho) && nu <= 1.0 / rho))
        throw CollateralViolation("round " + std::to_string(round) + ": bet " + format_double(nu) +
                                  " outside the nonnegativity window [-1/(1-rho), 1/rho]");
}

/// Embedded coin-tossing recursion K_n = K_{n-1} (1 + nu_n (x_n - rho)).
template <BetPolicy Policy>
CapitalTrajectory run_embedded_game(std::span<const Outcome> outcomes, Policy&& policy, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("run_embedded_game: rho must lie in (0,1)");
    CapitalTrajectory k;
    k.log_capital.reserve(outcomes.size() + 1);
    k.bets.reserve(outcomes.size());
    k.log_capital.push_back(0.0);
    Counts c;
    for (std::size_t n = 0; n < outcomes.size(); ++n) {
        const double nu = policy(outcomes.first(n), c);
        check_bet_window(nu, rho, n + 1);
        const double factor = std::max(0.0, 1.0 + nu * (bit(outcomes[n]) - rho));
        k.bets.push_back(nu);
        k.log_capital.push_back(k.log_capital.back() + std::log(factor));
        c.add(outcomes[n]);
    }
    k.log_capital_at_horizon = k.log_capital.back();
    return k;
}

namespace detail {
inline double log_position_factor(double exposure, double log_move) noexcept {
    return std::log(std::max(0.0, 1.0 + exposure * std::expm1(log_move)));
}
}  // namespace detail

struct ContinuousOptions {
    bool sample = false;  // also record K(t) at every grid point and trade time in the window
};

/// Continuous-time capital K(t) = K(t_i)(1 + theta_i (S(t) - S(t_i)) / S(t_i)) driven by the
/// limit-order trade times in `hits`, evaluated up to `t_end` (default: the scan horizon).
/// The position opened at the last trade before t_end stays open and is marked to market.
template <BetPolicy Policy>
CapitalTrajectory continuous_capital(const PricePath& path, const HitSequence& hits, Policy&& policy,
                                     const GridParams& grid, double t_end,
                                     ContinuousOptions opts = {}) {
    if (t_end < hits.start_time || t_end > path.horizon())
        throw ValidationError("continuous_capital: horizon outside [start, path horizon]");
    const double rho = risk_neutral_rho(grid);
    const auto completed = static_cast<std::size_t>(
        std::upper_bound(hits.times.begin(), hits.times.end(), t_end) - hits.times.begin());
    std::span<const Outcome> xs(hits.outcomes.data(), completed);

    CapitalTrajectory k;
    k.horizon = t_end;
    k.log_capital.reserve(completed + 1);
    k.bets.reserve(completed);
    k.exposures.reserve(completed);
    k.log_capital.push_back(0.0);
    Counts c;
    for (std::size_t n = 0; n < completed; ++n) {
        const double nu = policy(xs.first(n), c);
        check_bet_window(nu, rho, n + 1);
        const double theta = exposure_from_bet(nu, grid);
        k.bets.push_back(nu);
        k.exposures.push_back(theta);
        k.log_capital.push_back(k.log_capital.back() +
                                detail::log_position_factor(theta, hits.level(n + 1) - hits.level(n)));
        c.add(xs[n]);
    }
    k.open_bet = policy(xs, c);
    check_bet_window(k.open_bet, rho, completed + 1);
    k.open_exposure = exposure_from_bet(k.open_bet, grid);
    const double open_move = path.log_price_at(t_end) - hits.level(completed);
    k.open_factor = std::max(0.0, 1.0 + k.open_exposure * std::expm1(open_move));
    k.log_capital_at_horizon = k.log_capital.back() + std::log(k.open_factor);

    if (opts.sample) {
        const auto ts = path.times();
        const auto lp = path.log_prices();
        auto gi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), hits.start_time) -
                                           ts.begin());
        k.sample_times.push_back(hits.start_time);
        k.sample_log_capital.push_back(0.0);
        std::size_t round = 0;  // completed rounds before the current sample
        auto theta_of = [&](std::size_t r) { return r < completed ? k.exposures[r] : k.open_exposure; };
        while (true) {
            const double next_grid = gi < ts.size() && ts[gi] <= t_end ? ts[gi] : INFINITY;
            const double next_hit = round < completed ? hits.times[round] : INFINITY;
            if (next_grid == INFINITY && next_hit == INFINITY) break;
            if (next_hit <= next_grid) {
                ++round;
                k.sample_times.push_back(next_hit);
                k.sample_log_capital.push_back(k.log_capital[round]);
                if (next_hit == next_grid) ++gi;
            } else {
                k.sample_times.push_back(next_grid);
                k.sample_log_capital.push_back(
                    k.log_capital[round] +
                    detail::log_position_factor(theta_of(round), lp[gi] - hits.level(round)));
                ++gi;
            }
        }
        if (k.sample_times.back() < t_end) {
            k.sample_times.push_back(t_end);
            k.sample_log_capital.push_back(k.log_capital_at_horizon);
        }
    }
    return k;
}

/// log K(t) for any t in [start, trajectory horizon], from a trajectory built by
/// continuous_capital on the same path and hits.
inline double log_capital_at(const CapitalTrajectory& k, const HitSequence& hits, const PricePath& path,
                             double t) {
    const std::size_t completed = k.rounds();
    const auto r = static_cast<std::size_t>(
        std::upper_bound(hits.times.begin(), hits.times.begin() + static_cast<std::ptrdiff_t>(completed), t) -
        hits.times.begin());
    const double theta = r < completed ? k.exposures[r] : k.open_exposure;
    return k.log_capital[r] + detail::log_position_factor(theta, path.log_price_at(t) - hits.level(r));
}

/// Plain-text export "round,time,outcome,log_price", one row per completed round.
inline void write_hits(const HitSequence& hits, std::ostream& out) {
    out << "round,time,outcome,log_price\n";
    for (std::size_t i = 0; i < hits.rounds(); ++i)
        out << (i + 1) << ',' << format_double(hits.times[i]) << ',' << bit(hits.outcomes[i]) << ','
            << format_double(hits.log_prices[i]) << '\n';
}

}  // namespace ctgame
