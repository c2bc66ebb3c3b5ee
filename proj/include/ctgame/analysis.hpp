#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ctgame/error.hpp"
#include "ctgame/game.hpp"
#include "ctgame/price_path.hpp"
#include "ctgame/strategy.hpp"

namespace ctgame {

/// Statistics of one embedded game: round count, outcome counts, total eta-variation,
/// net move over completed rounds and the full-window log move.
struct GameSummary {
    std::size_t n_star = 0;
    std::size_t heads = 0;
    std::size_t tails = 0;
    double eta_up = 0.0;
    double eta_down = 0.0;
    double total_variation = 0.0;  // h eta_up + t eta_down
    double net_move = 0.0;         // h eta_up - t eta_down
    double horizon_move = 0.0;     // log S(T2) - log S(T1)
    std::optional<double> sigma;          // net_move / total_variation
    std::optional<double> head_fraction;  // h / n*
};

inline GameSummary summarize(const HitSequence& hits, const GridParams& grid, double horizon_move) {
    GameSummary s;
    const Counts c = Counts::of(hits.outcomes);
    s.n_star = c.n();
    s.heads = c.heads;
    s.tails = c.tails;
    s.eta_up = grid.eta_up();
    s.eta_down = grid.eta_down();
    const double h = static_cast<double>(c.heads);
    const double t = static_cast<double>(c.tails);
    s.total_variation = h * s.eta_up + t * s.eta_down;
    s.net_move = h * s.eta_up - t * s.eta_down;
    s.horizon_move = horizon_move;
    if (s.n_star > 0) {
        s.sigma = s.net_move / s.total_variation;
        s.head_fraction = h / static_cast<double>(s.n_star);
    }
    return s;
}

inline GameSummary summarize(const HitSequence& hits, const GridParams& grid, const PricePath& path) {
    return summarize(hits, grid, path.log_price_at(hits.horizon) - path.log_price_at(hits.start_time));
}

/// Round count recovered from (TV, sigma) alone:
/// n* = (eta1 + eta2 - sigma (eta1 - eta2)) / (2 eta1 eta2) * TV.
inline double n_star_from_variation(const GameSummary& s) {
    if (s.n_star == 0) return 0.0;
    const double e1 = s.eta_up;
    const double e2 = s.eta_down;
    return (e1 + e2 - *s.sigma * (e1 - e2)) / (2.0 * e1 * e2) * s.total_variation;
}

/// Which asymptotic approximation of the capital growth applies.
enum class Regime {
    symmetric,   // a1 == a2 (eta_up == eta_down)
    rare_heads,  // a1 < a2: eta_up shrinks slower, p and rho -> 0
    rare_tails,  // a1 > a2: eta_down shrinks slower, p and rho -> 1
};

inline std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::symmetric: return "symmetric";
        case Regime::rare_heads: return "rare_heads";
        case Regime::rare_tails: return "rare_tails";
    }
    return "?";
}

inline Regime regime_of(double eta_up, double eta_down) noexcept {
    const double rel = (eta_up - eta_down) / std::max(eta_up, eta_down);
    if (std::abs(rel) <= 1e-12) return Regime::symmetric;
    return eta_up > eta_down ? Regime::rare_heads : Regime::rare_tails;
}

struct CapitalPrediction {
    Regime regime = Regime::symmetric;
    double growth_exact = 0.0;   // n* D(p || rho)
    double stirling = 0.0;           // n* D(p || rho) - (1/2) log n*
    double growth_regime = 0.0;  // regime approximation of n* D(p || rho)
    double regime_log_capital = 0.0;  // growth_regime - (1/2) log n*
};

/// Growth approximation for the given regime written with a_i^k = 1 / eta_i:
///   symmetric:  (1/2) [a^k L^2 / TV + L + TV / (4 a^k)]
///   rare_heads: a1^k L^2 / TV
///   rare_tails: a2^k L^2 / TV + L + TV / (4 a2^k)
inline double regime_growth(Regime r, double eta_up, double eta_down, double tv, double horizon_move) {
    const double l = horizon_move;
    switch (r) {
        case Regime::symmetric: {
            const double ak = 1.0 / eta_up;
            return 0.5 * (ak * l * l / tv + l + tv / (4.0 * ak));
        }
        case Regime::rare_heads:
            return (1.0 / eta_up) * l * l / tv;
        case Regime::rare_tails: {
            const double a2k = 1.0 / eta_down;
            return a2k * l * l / tv + l + tv / (4.0 * a2k);
        }
    }
    return 0.0;
}

/// Exact growth n* D(p || rho) and its regime approximation. Empty when n* = 0.
inline std::optional<CapitalPrediction> predict_log_capital(const GameSummary& s, const GridParams& grid) {
    if (s.n_star == 0) return std::nullopt;
    CapitalPrediction pr;
    pr.regime = regime_of(grid.eta_up(), grid.eta_down());
    const double n = static_cast<double>(s.n_star);
    const double rho = risk_neutral_rho(grid);
    pr.growth_exact = n * kl(*s.head_fraction, rho);
    pr.stirling = pr.growth_exact - 0.5 * std::log(n);
    pr.growth_regime =
        regime_growth(pr.regime, grid.eta_up(), grid.eta_down(), s.total_variation, s.horizon_move);
    pr.regime_log_capital = pr.growth_regime - 0.5 * std::log(n);
    return pr;
}

inline std::optional<CapitalPrediction> predict_log_capital(const GameSummary& s, double a1, double a2,
                                                            int k) {
    return predict_log_capital(s, GridParams::at_scale(a1, a2, k));
}

/// n* D(p || rho) as a smooth function of (TV, L) on a fixed grid, with h and t
/// taken from h eta1 = (TV + L)/2 and t eta2 = (TV - L)/2 (not rounded to integers).
inline double growth_function(const GridParams& grid, double tv, double net_move) {
    const double h = (tv + net_move) / (2.0 * grid.eta_up());
    const double t = (tv - net_move) / (2.0 * grid.eta_down());
    if (h < 0.0 || t < 0.0) throw DomainError("growth_function: |L| must not exceed TV");
    return (h + t) * kl(h / (h + t), risk_neutral_rho(grid));
}

/// Coefficient of L^2 in the exact growth function at fixed TV, by a central second difference.
inline double growth_l2_coefficient(const GridParams& grid, double tv) {
    const double step = 1e-3 * tv;
    const double f0 = growth_function(grid, tv, 0.0);
    const double fp = growth_function(grid, tv, step);
    const double fm = growth_function(grid, tv, -step);
    return (fp - 2.0 * f0 + fm) / (2.0 * step * step);
}

/// Coefficient of L^2 in the regime approximation at fixed TV.
inline double regime_l2_coefficient(Regime r, const GridParams& grid, double tv) {
    switch (r) {
        case Regime::symmetric: return 0.5 / (grid.eta_up() * tv);
        case Regime::rare_heads: return 1.0 / (grid.eta_up() * tv);
        case Regime::rare_tails: return 1.0 / (grid.eta_down() * tv);
    }
    return 0.0;
}

/// Least-squares fit of log TV_k = log c + B k log a across the ladder.
struct TvScalingFit {
    double c = 0.0;
    double exponent = 0.0;  // B
    std::size_t points = 0;
};

inline std::optional<TvScalingFit> fit_tv_scaling(std::span<const int> ks, std::span<const double> tvs,
                                                  double a) {
    if (ks.size() != tvs.size()) throw ValidationError("fit_tv_scaling: size mismatch");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (tvs[i] > 0.0) {
            x.push_back(ks[i] * std::log(a));
            y.push_back(std::log(tvs[i]));
        }
    }
    if (x.size() < 2) return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    TvScalingFit fit;
    fit.exponent = sxy / sxx;
    fit.c = std::exp(my - fit.exponent * mx);
    fit.points = x.size();
    return fit;
}

}  // namespace ctgame
