#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctgame/analysis.hpp"
#include "ctgame/error.hpp"
#include "ctgame/events.hpp"
#include "ctgame/game.hpp"
#include "ctgame/price_path.hpp"
#include "ctgame/strategy.hpp"

namespace ctgame {

/// Scale ladder eta_{1k} = a_up^{-k}, eta_{2k} = a_down^{-k} for k in [k_min, k_max],
/// plus the thresholds used by the account constructions.
struct MultiScaleConfig {
    double a_up = 2.0;
    double a_down = 2.0;
    int k_min = 1;
    int k_max = 5;
    BetaBinomialParams prior{};
    double range = 1.0;    // A
    double target = 10.0;  // C
    double t_from = 0.0;
    std::optional<double> t_to;  // default: path horizon
    std::size_t max_rounds = 10'000'000;
    std::size_t accounts = 8;
    std::size_t ledger_samples = 1025;

    void validate() const {
        if (!(a_up > 1.0) || !(a_down > 1.0)) throw ConfigError("multiscale: a1 and a2 must be > 1");
        if (k_min < 1 || k_max < k_min) throw ConfigError("multiscale: need 1 <= k_min <= k_max");
        if (!(range > 0.0) || !(target > 0.0)) throw ConfigError("multiscale: A and C must be > 0");
        if (max_rounds == 0) throw ConfigError("multiscale: round budget must be positive");
        if (ledger_samples < 2) throw ConfigError("multiscale: need at least 2 ledger samples");
        prior.validate();
    }

    double end_time(const PricePath& path) const { return t_to.value_or(path.horizon()); }

    /// Base of the TV scaling law: a for the symmetric ladder, min(a1, a2) otherwise.
    double tv_base() const { return std::min(a_up, a_down); }
};

/// One rung of the ladder: an independent unit-capital beta-binomial run.
struct ScaleRecord {
    int k = 0;
    double eta_up = 0.0;
    double eta_down = 0.0;
    double rho = 0.5;
    GameSummary summary;
    bool skipped = false;
    std::string diagnostic;
    double log_capital = 0.0;            // log K_k(T), open position marked to market
    double log_capital_completed = 0.0;  // log K*_{n*}
    double open_factor = 1.0;
    std::optional<CapitalPrediction> prediction;
};

struct MultiScaleResult {
    double t_from = 0.0;
    double t_to = 0.0;
    std::vector<ScaleRecord> scales;
    std::optional<TvScalingFit> tv_fit;
};

inline ScaleRecord run_scale(const PricePath& path, const MultiScaleConfig& cfg, int k, double t_from,
                             double t_to) {
    ScaleRecord rec;
    rec.k = k;
    const auto grid = GridParams::at_scale(cfg.a_up, cfg.a_down, k);
    rec.eta_up = grid.eta_up();
    rec.eta_down = grid.eta_down();
    rec.rho = risk_neutral_rho(grid);
    auto hits = scan_hits(path, grid, t_from, t_to, ScanOptions{cfg.max_rounds});
    if (hits.truncated) {
        rec.skipped = true;
        rec.diagnostic = "k=" + std::to_string(k) + ": round budget " + std::to_string(cfg.max_rounds) +
                         " exceeded before the horizon; scale skipped";
        rec.log_capital = std::numeric_limits<double>::quiet_NaN();
        rec.log_capital_completed = rec.log_capital;
        return rec;
    }
    rec.summary = summarize(hits, grid, path);
    auto traj = continuous_capital(path, hits, BetaBinomialPolicy{cfg.prior, rec.rho}, grid, t_to);
    rec.log_capital = traj.log_capital_at_horizon;
    rec.log_capital_completed = traj.log_capital.back();
    rec.open_factor = traj.open_factor;
    rec.prediction = predict_log_capital(rec.summary, grid);
    return rec;
}

inline MultiScaleResult run_multiscale(const PricePath& path, const MultiScaleConfig& cfg, double t_from,
                                       double t_to) {
    cfg.validate();
    MultiScaleResult res;
    res.t_from = t_from;
    res.t_to = t_to;
    std::vector<int> ks;
    std::vector<double> tvs;
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        res.scales.push_back(run_scale(path, cfg, k, t_from, t_to));
        if (!res.scales.back().skipped) {
            ks.push_back(k);
            tvs.push_back(res.scales.back().summary.total_variation);
        }
    }
    res.tv_fit = fit_tv_scaling(ks, tvs, cfg.tv_base());
    return res;
}

inline MultiScaleResult run_multiscale(const PricePath& path, const MultiScaleConfig& cfg) {
    return run_multiscale(path, cfg, cfg.t_from, cfg.end_time(path));
}

/// Smallest scale whose horizon capital exceeds `target`, if any.
inline std::optional<int> forcing_witness(const MultiScaleResult& res, double target) {
    const double lc = std::log(target);
    for (const auto& s : res.scales)
        if (!s.skipped && s.log_capital > lc) return s.k;
    return std::nullopt;
}

/// Capital split between the ladder started at T1 and the ladder started at the
/// first exit t_A of the A/2 band around log S(T1).
struct TwoAccountResult {
    double weight_first = 0.5;
    std::optional<double> exit_time;
    double anchor_move_start = 0.0;               // |log S(T) - log S(T1)|
    std::optional<double> anchor_move_exit;       // |log S(T) - log S(t_A)|
    bool range_exceeded = false;                  // path leaves the A-event on [T1, T]
    bool guarantee_holds = true;                  // max anchor move >= A/4 whenever t_A exists
    std::vector<int> ks;
    std::vector<double> log_capital_first;
    std::vector<double> log_capital_second;       // 0 (idle, unit capital kept) when t_A never realises
    std::vector<double> log_capital_max;
    MultiScaleResult first;
    std::optional<MultiScaleResult> second;

    double max_anchor_move() const { return std::max(anchor_move_start, anchor_move_exit.value_or(0.0)); }
};

inline TwoAccountResult two_account(const PricePath& path, const MultiScaleConfig& cfg) {
    cfg.validate();
    TwoAccountResult r;
    const double t1 = cfg.t_from;
    const double t2 = cfg.end_time(path);
    r.range_exceeded = !in_event_range(path, cfg.range, t1, t2);
    r.exit_time = first_band_exit(path, t1, t2, cfg.range / 2.0);
    const double end_lp = path.log_price_at(t2);
    r.anchor_move_start = std::abs(end_lp - path.log_price_at(t1));
    r.first = run_multiscale(path, cfg, t1, t2);
    if (r.exit_time) {
        r.anchor_move_exit = std::abs(end_lp - path.log_price_at(*r.exit_time));
        r.guarantee_holds = r.max_anchor_move() >= cfg.range / 4.0;
        if (*r.exit_time < t2) r.second = run_multiscale(path, cfg, *r.exit_time, t2);
    }
    for (std::size_t i = 0; i < r.first.scales.size(); ++i) {
        r.ks.push_back(r.first.scales[i].k);
        r.log_capital_first.push_back(r.first.scales[i].log_capital);
        r.log_capital_second.push_back(r.second ? r.second->scales[i].log_capital : 0.0);
        r.log_capital_max.push_back(std::max(r.log_capital_first.back(), r.log_capital_second.back()));
    }
    return r;
}

/// Capital of one strategy on a fixed time axis, as natural logs.
struct SampledCapital {
    std::vector<double> times;
    std::vector<double> log_capital;
};

/// Static mixture: capital of sum_i w_i P_i is sum_i w_i K_i(t), pointwise.
inline SampledCapital mix(std::span<const SampledCapital> runs, std::span<const double> weights) {
    if (runs.empty() || runs.size() != weights.size())
        throw ConfigError("mix: need one weight per run and at least one run");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ConfigError("mix: weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("mix: weights must sum to 1");
    for (const auto& r : runs)
        if (r.times != runs[0].times || r.log_capital.size() != r.times.size())
            throw ConfigError("mix: runs must share one time axis");
    SampledCapital out;
    out.times = runs[0].times;
    out.log_capital.resize(out.times.size());
    for (std::size_t j = 0; j < out.times.size(); ++j) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < runs.size(); ++i)
            if (weights[i] > 0.0) mx = std::max(mx, std::log(weights[i]) + runs[i].log_capital[j]);
        if (mx == -std::numeric_limits<double>::infinity()) {
            out.log_capital[j] = mx;
            continue;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < runs.size(); ++i)
            if (weights[i] > 0.0) s += std::exp(std::log(weights[i]) + runs[i].log_capital[j] - mx);
        out.log_capital[j] = mx + std::log(s);
    }
    return out;
}

/// Unit-capital beta-binomial run at one scale, evaluated on a given time axis.
inline SampledCapital sample_scale_capital(const PricePath& path, const MultiScaleConfig& cfg, int k,
                                           std::span<const double> times) {
    const auto grid = GridParams::at_scale(cfg.a_up, cfg.a_down, k);
    const double t2 = cfg.end_time(path);
    auto hits = scan_hits(path, grid, cfg.t_from, t2, ScanOptions{cfg.max_rounds});
    auto traj = continuous_capital(path, hits, BetaBinomialPolicy{cfg.prior, risk_neutral_rho(grid)}, grid, t2);
    SampledCapital s;
    s.times.assign(times.begin(), times.end());
    for (double t : times) s.log_capital.push_back(log_capital_at(traj, hits, path, t));
    return s;
}

/// Account i of the countable-mixture emulation: initial capital 2^-i, plays the
/// scale k_i = k_min + i - 1 and freezes (collects one unit) once its capital reaches 1.
struct LedgerAccount {
    std::size_t index = 0;  // 1-based
    int k = 0;
    double initial_capital = 0.0;
    bool skipped = false;
    bool frozen = false;
    std::optional<double> freeze_time;
    double sup_log_unit_capital = 0.0;  // sup over the window of the unit-capital run, log
    double final_capital = 0.0;         // contribution at the horizon
    std::string descriptor;
};

struct AccountLedger {
    std::vector<LedgerAccount> accounts;
    std::vector<double> times;
    std::vector<double> totals;
    std::vector<std::size_t> frozen_counts;
    std::vector<std::vector<double>> capitals;  // [time][account]

    std::size_t frozen() const {
        return static_cast<std::size_t>(
            std::count_if(accounts.begin(), accounts.end(), [](const auto& a) { return a.frozen; }));
    }
    double initial_total() const {
        double s = 0.0;
        for (const auto& a : accounts) s += a.initial_capital;
        return s;
    }
};

inline AccountLedger dyadic_ladder(const PricePath& path, const MultiScaleConfig& cfg) {
    cfg.validate();
    if (cfg.accounts == 0) throw ConfigError("dyadic_ladder: need at least one account");
    const double t1 = cfg.t_from;
    const double t2 = cfg.end_time(path);

    struct Run {
        HitSequence hits;
        CapitalTrajectory traj;
    };
    std::vector<Run> runs(cfg.accounts);
    AccountLedger ledger;

    for (std::size_t i = 1; i <= cfg.accounts; ++i) {
        LedgerAccount acc;
        acc.index = i;
        acc.k = cfg.k_min + static_cast<int>(i) - 1;
        acc.initial_capital = std::ldexp(1.0, -static_cast<int>(i));
        acc.descriptor = "beta-binomial limit orders, k=" + std::to_string(acc.k) + ", target 2^" +
                         std::to_string(i);
        const auto grid = GridParams::at_scale(cfg.a_up, cfg.a_down, acc.k);
        auto& run = runs[i - 1];
        run.hits = scan_hits(path, grid, t1, t2, ScanOptions{cfg.max_rounds});
        if (run.hits.truncated) {
            acc.skipped = true;
            acc.final_capital = acc.initial_capital;
            acc.descriptor += " (skipped: round budget exceeded)";
            ledger.accounts.push_back(acc);
            continue;
        }
        run.traj = continuous_capital(path, run.hits, BetaBinomialPolicy{cfg.prior, risk_neutral_rho(grid)},
                                      grid, t2, ContinuousOptions{.sample = true});
        const auto& st = run.traj.sample_times;
        const auto& sl = run.traj.sample_log_capital;
        const double log_target = static_cast<double>(i) * std::log(2.0);
        acc.sup_log_unit_capital = *std::max_element(sl.begin(), sl.end());
        for (std::size_t j = 1; j < st.size(); ++j) {
            if (sl[j] >= log_target) {
                // K(t) is monotone between consecutive samples: bisect for the crossing.
                double lo = st[j - 1], hi = st[j];
                for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    if (log_capital_at(run.traj, run.hits, path, mid) >= log_target) hi = mid;
                    else lo = mid;
                }
                acc.frozen = true;
                acc.freeze_time = hi;
                break;
            }
        }
        run.traj.sample_times.clear();
        run.traj.sample_times.shrink_to_fit();
        run.traj.sample_log_capital.clear();
        run.traj.sample_log_capital.shrink_to_fit();
        acc.final_capital = acc.frozen ? 1.0 : acc.initial_capital * std::exp(run.traj.log_capital_at_horizon);
        ledger.accounts.push_back(acc);
    }

    for (std::size_t j = 0; j < cfg.ledger_samples; ++j)
        ledger.times.push_back(t1 + (t2 - t1) * static_cast<double>(j) /
                                        static_cast<double>(cfg.ledger_samples - 1));
    ledger.times.back() = t2;
    for (const auto& a : ledger.accounts)
        if (a.freeze_time) ledger.times.push_back(*a.freeze_time);
    std::sort(ledger.times.begin(), ledger.times.end());
    ledger.times.erase(std::unique(ledger.times.begin(), ledger.times.end()), ledger.times.end());

    for (double t : ledger.times) {
        std::vector<double> caps;
        double total = 0.0;
        std::size_t frozen = 0;
        for (std::size_t i = 0; i < ledger.accounts.size(); ++i) {
            const auto& a = ledger.accounts[i];
            double c;
            if (a.skipped) {
                c = a.initial_capital;
            } else if (a.freeze_time && t >= *a.freeze_time) {
                c = 1.0;
                ++frozen;
            } else {
                c = a.initial_capital * std::exp(log_capital_at(runs[i].traj, runs[i].hits, path, t));
            }
            caps.push_back(c);
            total += c;
        }
        ledger.capitals.push_back(std::move(caps));
        ledger.totals.push_back(total);
        ledger.frozen_counts.push_back(frozen);
    }
    return ledger;
}

}  // namespace ctgame
