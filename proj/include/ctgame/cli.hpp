#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ctgame/analysis.hpp"
#include "ctgame/events.hpp"
#include "ctgame/forcing.hpp"
#include "ctgame/game.hpp"
#include "ctgame/path_io.hpp"
#include "ctgame/pathgen.hpp"
#include "ctgame/report.hpp"
#include "ctgame/stats.hpp"
#include "ctgame/strategy.hpp"
#include "ctgame/variation.hpp"

namespace ctgame::cli {

/// Either a path file or a generator spec.
struct PathSource {
    std::optional<std::filesystem::path> file;
    PathSpec spec;

    void validate() const {
        if (file) {
            if (!std::filesystem::is_regular_file(*file))
                throw ConfigError("path file not found: " + file->string());
        } else {
            spec.validate();
        }
    }
    PricePath load() const { return file ? read_path(*file) : generate(spec); }
    Json describe() const { return file ? Json{{"file", file->string()}} : Json{{"spec", to_json(spec)}}; }
    std::vector<std::uint64_t> seeds() const {
        if (file || spec.kind != PathKind::fbm) return {};
        return {spec.seed};
    }
};

inline void check_output(const std::optional<std::filesystem::path>& out) {
    if (!out) return;
    auto dir = out->parent_path();
    if (!dir.empty() && !std::filesystem::is_directory(dir))
        throw ConfigError("output directory does not exist: " + dir.string());
}

inline std::string to_text(const Json& j) { return j.dump(2) + "\n"; }

// paths gen ------------------------------------------------------------------

struct PathsGenConfig {
    PathSpec spec;
    std::vector<std::uint64_t> seeds;  // empty: spec.seed
    std::filesystem::path out;         // file, or directory when several seeds are given
};

inline std::filesystem::path seeded_file(const std::filesystem::path& dir, std::uint64_t seed) {
    return dir / ("path_" + std::to_string(seed) + ".csv");
}

inline std::vector<std::filesystem::path> cmd_paths_gen(const PathsGenConfig& cfg) {
    cfg.spec.validate();
    std::vector<std::filesystem::path> written;
    if (cfg.seeds.size() <= 1) {
        check_output(cfg.out);
        PathSpec s = cfg.spec;
        if (!cfg.seeds.empty()) s.seed = cfg.seeds.front();
        write_path(generate(s), cfg.out);
        written.push_back(cfg.out);
        return written;
    }
    if (!std::filesystem::is_directory(cfg.out))
        throw ConfigError("with several seeds --out must be an existing directory");
    for (auto seed : cfg.seeds) {
        PathSpec s = cfg.spec;
        s.seed = seed;
        auto dest = seeded_file(cfg.out, seed);
        write_path(generate(s), dest);
        written.push_back(dest);
    }
    return written;
}

// game run -------------------------------------------------------------------

struct GameRunConfig {
    PathSource source;
    double a_up = 2.0;
    double a_down = 2.0;
    int k = 4;
    std::optional<double> delta_up;  // both deltas given: overrides (a1, a2, k)
    std::optional<double> delta_down;
    BetaBinomialParams prior{};
    double t_from = 0.0;
    std::optional<double> t_to;
    std::size_t max_rounds = 10'000'000;

    GridParams grid() const {
        if (delta_up.has_value() != delta_down.has_value())
            throw ConfigError("game run: give both --delta-up and --delta-down or neither");
        if (delta_up) return GridParams::from_deltas(*delta_up, *delta_down);
        if (!(a_up > 1.0) || !(a_down > 1.0) || k < 0) throw ConfigError("game run: need a1, a2 > 1 and k >= 0");
        return GridParams::at_scale(a_up, a_down, k);
    }
    Json to_json() const {
        Json j;
        j["source"] = source.describe();
        j["a1"] = a_up;
        j["a2"] = a_down;
        j["k"] = k;
        j["delta_up"] = opt_json(delta_up);
        j["delta_down"] = opt_json(delta_down);
        j["alpha"] = prior.alpha;
        j["beta"] = prior.beta;
        j["t1"] = t_from;
        j["t2"] = opt_json(t_to);
        j["max_rounds"] = max_rounds;
        return j;
    }
};

struct GameRunOutput {
    Json report;
    HitSequence hits;
    std::string table;  // header + one row
};

inline GameRunOutput cmd_game_run(const GameRunConfig& cfg) {
    cfg.source.validate();
    cfg.prior.validate();
    const auto grid = cfg.grid();
    const PricePath path = cfg.source.load();
    const double t2 = cfg.t_to.value_or(path.horizon());

    GameRunOutput out;
    out.hits = scan_hits(path, grid, cfg.t_from, t2, ScanOptions{cfg.max_rounds});
    if (out.hits.truncated)
        throw ConfigError("game run: round budget " + std::to_string(cfg.max_rounds) + " exceeded");
    const double rho = risk_neutral_rho(grid);
    const auto summary = summarize(out.hits, grid, path);
    const auto traj = continuous_capital(path, out.hits, BetaBinomialPolicy{cfg.prior, rho}, grid, t2);
    const auto pred = predict_log_capital(summary, grid);

    Json& r = out.report;
    r["provenance"] = provenance("game run", cfg.to_json(), cfg.source.seeds());
    r["grid"] = to_json(grid);
    r["window"] = {{"t1", cfg.t_from}, {"t2", t2}};
    r["summary"] = to_json(summary);
    r["n_star_from_variation"] = n_star_from_variation(summary);
    Json cap;
    cap["log_capital_completed"] = traj.log_capital.back();
    cap["closed_form"] = closed_form_log_capital(Counts::of(out.hits.outcomes), cfg.prior, rho);
    cap["open_bet"] = traj.open_bet;
    cap["open_factor"] = traj.open_factor;
    cap["log_capital_horizon"] = traj.log_capital_at_horizon;
    r["capital"] = std::move(cap);
    r["prediction"] = pred ? to_json(*pred) : Json(nullptr);

    out.table = std::string(kGameTableHeader) + "\n" +
                game_table_row(cfg.delta_up ? 0 : cfg.k, summary, traj.log_capital.back(), pred) + "\n";
    return out;
}

// sweep ----------------------------------------------------------------------

struct SweepConfig {
    std::vector<double> hursts{0.5};
    std::vector<std::uint64_t> seeds;
    PathSpec base;  // kind fbm; hurst and seed are overwritten per run
    MultiScaleConfig ladder;
    double min_abs_move = 0.0;  // keep only seeds with |log S(T2) - log S(T1)| >= this

    void validate() const {
        if (seeds.empty()) throw ConfigError("sweep: seed list must not be empty");
        if (hursts.empty()) throw ConfigError("sweep: need at least one Hurst exponent");
        for (double h : hursts) {
            PathSpec s = base;
            s.kind = PathKind::fbm;
            s.hurst = h;
            s.validate();
        }
        ladder.validate();
        if (!(min_abs_move >= 0.0)) throw ConfigError("sweep: --min-abs-move must be >= 0");
    }
    std::vector<std::uint64_t> sorted_seeds() const {
        auto s = seeds;
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    }
    Json to_json() const {
        Json j;
        j["hurst"] = hursts;
        j["n_points"] = base.n_points;
        j["horizon"] = base.horizon;
        j["sigma"] = base.sigma;
        j["initial_price"] = base.initial_price;
        j["ladder"] = ctgame::to_json(ladder);
        j["min_abs_move"] = min_abs_move;
        j["seed_count"] = sorted_seeds().size();
        return j;
    }
};

struct SweepOutput {
    Json report;
    std::string runs_table;       // one row per (H, seed, k)
    std::string aggregate_table;  // one row per (H, k)
};

/// Runs the ladder on one fBm path per (H, seed). Seeds are de-duplicated and
/// processed in ascending order, so the report does not depend on the order given.
inline SweepOutput cmd_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto seeds = cfg.sorted_seeds();
    SweepOutput out;
    Json& r = out.report;
    r["provenance"] = provenance("sweep", cfg.to_json(), seeds);
    r["results"] = Json::array();
    std::ostringstream runs;
    std::ostringstream agg;
    runs << "H,seed," << kGameTableHeader << ",skipped\n";
    agg << "H,k,runs,skipped,logK_median,logK_q25,logK_q75,TV_median,n_star_median\n";

    for (double h : cfg.hursts) {
        PathSpec spec = cfg.base;
        spec.kind = PathKind::fbm;
        spec.hurst = h;
        FbmSampler sampler(spec.n_points, spec.hurst, spec.horizon);
        std::map<int, std::vector<double>> log_k, tv, nstar;
        std::map<int, std::size_t> skipped;
        std::vector<std::uint64_t> used;
        for (auto seed : seeds) {
            const PricePath path = sampler.sample(seed, spec.sigma, spec.initial_price);
            const double t2 = cfg.ladder.end_time(path);
            if (std::abs(path.log_price_at(t2) - path.log_price_at(cfg.ladder.t_from)) < cfg.min_abs_move)
                continue;
            used.push_back(seed);
            const auto ms = run_multiscale(path, cfg.ladder);
            for (const auto& s : ms.scales) {
                if (s.skipped) {
                    ++skipped[s.k];
                    runs << format_double(h) << ',' << seed << ',' << s.k << ",,,,,,,,,,,1\n";
                    continue;
                }
                log_k[s.k].push_back(s.log_capital);
                tv[s.k].push_back(s.summary.total_variation);
                nstar[s.k].push_back(static_cast<double>(s.summary.n_star));
                runs << format_double(h) << ',' << seed << ','
                     << game_table_row(s.k, s.summary, s.log_capital, s.prediction) << ",0\n";
            }
        }
        Json hj;
        hj["hurst"] = h;
        hj["seeds_used"] = used;
        hj["scales"] = Json::array();
        for (int k = cfg.ladder.k_min; k <= cfg.ladder.k_max; ++k) {
            const auto& lk = log_k[k];
            Json kj;
            kj["k"] = k;
            kj["runs"] = lk.size();
            kj["skipped"] = skipped[k];
            kj["log_capital"] = {{"median", median(lk)},
                                 {"q25", lk.empty() ? NAN : quantile(lk, 0.25)},
                                 {"q75", lk.empty() ? NAN : quantile(lk, 0.75)}};
            kj["total_variation_median"] = median(tv[k]);
            kj["n_star_median"] = median(nstar[k]);
            agg << format_double(h) << ',' << k << ',' << lk.size() << ',' << skipped[k] << ','
                << format_double(median(lk)) << ',' << format_double(kj["log_capital"]["q25"].get<double>())
                << ',' << format_double(kj["log_capital"]["q75"].get<double>()) << ','
                << format_double(median(tv[k])) << ',' << format_double(median(nstar[k])) << '\n';
            hj["scales"].push_back(std::move(kj));
        }
        r["results"].push_back(std::move(hj));
    }
    out.runs_table = runs.str();
    out.aggregate_table = agg.str();
    return out;
}

// force run ------------------------------------------------------------------

struct ForceConfig {
    PathSource source;
    MultiScaleConfig ladder;

    Json to_json() const {
        Json j;
        j["source"] = source.describe();
        j["ladder"] = ctgame::to_json(ladder);
        return j;
    }
};

inline Json cmd_force(const ForceConfig& cfg) {
    cfg.source.validate();
    cfg.ladder.validate();
    if (cfg.ladder.accounts == 0) throw ConfigError("force run: need at least one account");
    const PricePath path = cfg.source.load();
    const auto two = two_account(path, cfg.ladder);
    const auto ledger = dyadic_ladder(path, cfg.ladder);
    Json r;
    r["provenance"] = provenance("force run", cfg.to_json(), cfg.source.seeds());
    r["multiscale"] = to_json(two.first);
    r["two_account"] = to_json(two);
    const auto w = forcing_witness(two.first, cfg.ladder.target);
    r["witness_k"] = opt_json(w);
    r["ledger"] = to_json(ledger);
    return r;
}

// analyze --------------------------------------------------------------------

struct AnalyzeConfig {
    PathSource source;
    double t_from = 0.0;
    std::optional<double> t_to;
    std::vector<double> p_values{1.0, 2.0};
    int max_depth = -1;
    std::optional<double> holder_h;  // with holder_c: upper/lower event checks
    std::optional<double> holder_c;
    std::optional<double> range;     // A for the range event

    Json to_json() const {
        Json j;
        j["source"] = source.describe();
        j["t1"] = t_from;
        j["t2"] = opt_json(t_to);
        j["p"] = p_values;
        j["max_depth"] = max_depth;
        j["holder_h"] = opt_json(holder_h);
        j["holder_c"] = opt_json(holder_c);
        j["A"] = opt_json(range);
        return j;
    }
};

inline Json cmd_analyze(const AnalyzeConfig& cfg) {
    cfg.source.validate();
    for (double p : cfg.p_values)
        if (!(p >= 1.0)) throw DomainError("analyze: p must be >= 1");
    if (cfg.holder_h.has_value() != cfg.holder_c.has_value())
        throw ConfigError("analyze: give both --holder-h and --holder-c or neither");
    const PricePath path = cfg.source.load();
    const double t2 = cfg.t_to.value_or(path.horizon());
    const auto w = window(path, cfg.t_from, t2);

    Json r;
    r["provenance"] = provenance("analyze", cfg.to_json(), cfg.source.seeds());
    r["window"] = {{"t1", cfg.t_from}, {"t2", t2}, {"points", w.times.size()}};
    r["p_variation"] = Json::array();
    for (double p : cfg.p_values) {
        const auto est = p_variation(w.log_prices, p, cfg.max_depth);
        r["p_variation"].push_back({{"p", p},
                                    {"estimate", est.estimate},
                                    {"dyadic_sup", est.dyadic_sup},
                                    {"extrema_sum", est.extrema_sum},
                                    {"dyadic_sums", est.dyadic_sums}});
    }
    VexOptions vo;
    vo.max_depth = cfg.max_depth;
    const auto vex = vex_estimate(w.log_prices, vo);
    r["vex"] = vex.vex;
    r["holder"] = vex.holder;
    Json ev;
    if (cfg.holder_h) {
        ev["max_holder_ratio"] = max_holder_ratio(w.times, w.log_prices, *cfg.holder_h);
        ev["upper"] = in_event_upper(path, *cfg.holder_h, *cfg.holder_c, cfg.t_from, t2);
        ev["lower"] = in_event_lower(path, *cfg.holder_h, *cfg.holder_c, cfg.t_from, t2);
    }
    if (cfg.range) {
        ev["range"] = in_event_range(path, *cfg.range, cfg.t_from, t2);
        auto [lo, hi] = std::minmax_element(w.log_prices.begin(), w.log_prices.end());
        ev["observed_range"] = *hi - *lo;
    }
    r["events"] = ev.is_null() ? Json::object() : ev;
    return r;
}

}  // namespace ctgame::cli
