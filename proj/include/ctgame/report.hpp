#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ctgame/analysis.hpp"
#include "ctgame/forcing.hpp"
#include "ctgame/path_io.hpp"
#include "ctgame/pathgen.hpp"
#include "ctgame/version.hpp"

namespace ctgame {

using Json = nlohmann::ordered_json;

inline std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Header stamped on every report: command, artifact version, hash of the
/// canonical config dump and the seeds used.
inline Json provenance(std::string_view command, const Json& config, const std::vector<std::uint64_t>& seeds) {
    Json p;
    p["tool"] = "ctgame";
    p["version"] = kVersion;
    p["command"] = command;
    p["config_hash"] = "fnv1a64:" + hex64(fnv1a64(config.dump()));
    p["seeds"] = seeds;
    p["config"] = config;
    return p;
}

template <class T>
Json opt_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

inline Json to_json(const PathSpec& s) {
    Json j;
    j["kind"] = to_string(s.kind);
    j["n_points"] = s.n_points;
    j["horizon"] = s.horizon;
    j["initial_price"] = s.initial_price;
    switch (s.kind) {
        case PathKind::fbm:
            j["hurst"] = s.hurst;
            j["sigma"] = s.sigma;
            j["seed"] = s.seed;
            break;
        case PathKind::log_linear: j["slope"] = s.slope; break;
        case PathKind::sinusoid:
            j["amplitude"] = s.amplitude;
            j["frequency"] = s.frequency;
            break;
        case PathKind::weierstrass:
            j["base"] = s.weierstrass_base;
            j["holder"] = s.weierstrass_holder;
            break;
        case PathKind::constant: break;
    }
    return j;
}

inline Json to_json(const GridParams& g) {
    return Json{{"delta_up", g.delta_up()},
                {"delta_down", g.delta_down()},
                {"eta_up", g.eta_up()},
                {"eta_down", g.eta_down()},
                {"rho", risk_neutral_rho(g)}};
}

inline Json to_json(const GameSummary& s) {
    Json j;
    j["n_star"] = s.n_star;
    j["heads"] = s.heads;
    j["tails"] = s.tails;
    j["total_variation"] = s.total_variation;
    j["net_move"] = s.net_move;
    j["horizon_move"] = s.horizon_move;
    j["sigma"] = opt_json(s.sigma);
    j["head_fraction"] = opt_json(s.head_fraction);
    return j;
}

inline Json to_json(const CapitalPrediction& p) {
    return Json{{"regime", to_string(p.regime)},
                {"growth_exact", p.growth_exact},
                {"stirling", p.stirling},
                {"growth_regime", p.growth_regime},
                {"regime_log_capital", p.regime_log_capital}};
}

inline Json to_json(const MultiScaleConfig& c) {
    Json j;
    j["a1"] = c.a_up;
    j["a2"] = c.a_down;
    j["k_min"] = c.k_min;
    j["k_max"] = c.k_max;
    j["alpha"] = c.prior.alpha;
    j["beta"] = c.prior.beta;
    j["A"] = c.range;
    j["C"] = c.target;
    j["t1"] = c.t_from;
    j["t2"] = opt_json(c.t_to);
    j["max_rounds"] = c.max_rounds;
    j["accounts"] = c.accounts;
    j["ledger_samples"] = c.ledger_samples;
    return j;
}

inline Json to_json(const ScaleRecord& r) {
    Json j;
    j["k"] = r.k;
    j["eta_up"] = r.eta_up;
    j["eta_down"] = r.eta_down;
    j["rho"] = r.rho;
    j["skipped"] = r.skipped;
    if (r.skipped) {
        j["diagnostic"] = r.diagnostic;
        return j;
    }
    j["summary"] = to_json(r.summary);
    j["log_capital"] = r.log_capital;
    j["log_capital_completed"] = r.log_capital_completed;
    j["open_factor"] = r.open_factor;
    j["prediction"] = r.prediction ? to_json(*r.prediction) : Json(nullptr);
    return j;
}

inline Json to_json(const MultiScaleResult& m) {
    Json j;
    j["t_from"] = m.t_from;
    j["t_to"] = m.t_to;
    j["scales"] = Json::array();
    for (const auto& s : m.scales) j["scales"].push_back(to_json(s));
    if (m.tv_fit)
        j["tv_fit"] = Json{{"c", m.tv_fit->c}, {"exponent", m.tv_fit->exponent}, {"points", m.tv_fit->points}};
    else
        j["tv_fit"] = nullptr;
    return j;
}

inline Json to_json(const TwoAccountResult& r) {
    Json j;
    j["weights"] = {r.weight_first, 1.0 - r.weight_first};
    j["exit_time"] = opt_json(r.exit_time);
    j["anchor_move_start"] = r.anchor_move_start;
    j["anchor_move_exit"] = opt_json(r.anchor_move_exit);
    j["range_exceeded"] = r.range_exceeded;
    j["guarantee_holds"] = r.guarantee_holds;
    j["k"] = r.ks;
    j["log_capital_first"] = r.log_capital_first;
    j["log_capital_second"] = r.log_capital_second;
    j["log_capital_max"] = r.log_capital_max;
    return j;
}

inline Json to_json(const AccountLedger& l) {
    Json j;
    j["accounts"] = Json::array();
    for (const auto& a : l.accounts) {
        Json aj;
        aj["index"] = a.index;
        aj["k"] = a.k;
        aj["initial_capital"] = a.initial_capital;
        aj["skipped"] = a.skipped;
        aj["frozen"] = a.frozen;
        aj["freeze_time"] = opt_json(a.freeze_time);
        aj["sup_log_unit_capital"] = a.sup_log_unit_capital;
        aj["final_capital"] = a.final_capital;
        aj["strategy"] = a.descriptor;
        j["accounts"].push_back(std::move(aj));
    }
    j["frozen"] = l.frozen();
    j["initial_total"] = l.initial_total();
    j["final_total"] = l.totals.empty() ? l.initial_total() : l.totals.back();
    j["times"] = l.times;
    j["totals"] = l.totals;
    j["frozen_counts"] = l.frozen_counts;
    return j;
}

/// One comma-separated row: k,n_star,h,t,TV,L,sigma,p,logK_exact,logK_stirling,logK_regime.
inline constexpr std::string_view kGameTableHeader =
    "k,n_star,h,t,TV,L,sigma,p,logK_exact,logK_stirling,logK_regime";

inline std::string game_table_row(int k, const GameSummary& s, double log_k,
                                  const std::optional<CapitalPrediction>& pr) {
    auto num = [](std::optional<double> v) { return v ? format_double(*v) : std::string("nan"); };
    std::string row = std::to_string(k) + ',' + std::to_string(s.n_star) + ',' + std::to_string(s.heads) +
                      ',' + std::to_string(s.tails) + ',' + format_double(s.total_variation) + ',' +
                      format_double(s.horizon_move) + ',' + num(s.sigma) + ',' + num(s.head_fraction) + ',' +
                      format_double(log_k) + ',';
    row += pr ? format_double(pr->stirling) + ',' + format_double(pr->regime_log_capital) : "nan,nan";
    return row;
}

}  // namespace ctgame
