#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ctgame/cli.hpp"

namespace fs = std::filesystem;
using namespace ctgame;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct SpecFlags {
    std::string kind = "fbm";
    PathSpec spec;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
    cmd->add_option("--kind", f.kind, "fbm | constant | log_linear | sinusoid | weierstrass")->capture_default_str();
    cmd->add_option("--hurst", f.spec.hurst, "Hurst exponent H")->capture_default_str();
    cmd->add_option("--sigma", f.spec.sigma, "fBm scale")->capture_default_str();
    cmd->add_option("--horizon", f.spec.horizon, "T")->capture_default_str();
    cmd->add_option("--points", f.spec.n_points, "grid points including t=0")->capture_default_str();
    cmd->add_option("--s0", f.spec.initial_price, "S(0)")->capture_default_str();
    cmd->add_option("--seed", f.spec.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--slope", f.spec.slope, "log_linear slope")->capture_default_str();
    cmd->add_option("--amplitude", f.spec.amplitude, "sinusoid amplitude")->capture_default_str();
    cmd->add_option("--frequency", f.spec.frequency, "sinusoid frequency")->capture_default_str();
    cmd->add_option("--w-base", f.spec.weierstrass_base, "Weierstrass base b")->capture_default_str();
    cmd->add_option("--w-holder", f.spec.weierstrass_holder, "Weierstrass exponent h")->capture_default_str();
}

PathSpec resolve(const SpecFlags& f) {
    PathSpec s = f.spec;
    s.kind = parse_path_kind(f.kind);
    return s;
}

void add_ladder_flags(CLI::App* cmd, MultiScaleConfig& m, std::optional<double>& t2) {
    cmd->add_option("--a1", m.a_up, "up-scale base")->capture_default_str();
    cmd->add_option("--a2", m.a_down, "down-scale base")->capture_default_str();
    cmd->add_option("--kmin", m.k_min, "first scale index")->capture_default_str();
    cmd->add_option("--kmax", m.k_max, "last scale index")->capture_default_str();
    cmd->add_option("--alpha", m.prior.alpha, "Beta prior alpha")->capture_default_str();
    cmd->add_option("--beta", m.prior.beta, "Beta prior beta")->capture_default_str();
    cmd->add_option("--t1", m.t_from, "window start")->capture_default_str();
    cmd->add_option("--t2", t2, "window end (default: path horizon)");
    cmd->add_option("--max-rounds", m.max_rounds, "round budget per scale")->capture_default_str();
}

std::vector<std::uint64_t> seed_list(const std::vector<std::uint64_t>& listed, std::size_t count,
                                     std::uint64_t base) {
    if (!listed.empty()) return listed;
    std::vector<std::uint64_t> s;
    for (std::size_t i = 0; i < count; ++i) s.push_back(base + i);
    return s;
}

void write_text(const fs::path& dest, const std::string& text) {
    write_atomically(dest, [&](std::ostream& o) { o << text; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous-time coin-tossing game toolkit"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "INI config file; command-line flags win");
    app.require_subcommand(1);

    // paths gen
    auto* paths = app.add_subcommand("paths", "path files");
    paths->require_subcommand(1);
    auto* gen = paths->add_subcommand("gen", "generate price paths");
    SpecFlags gen_spec;
    std::vector<std::uint64_t> gen_seeds;
    fs::path gen_out;
    add_spec_flags(gen, gen_spec);
    gen->add_option("--seeds", gen_seeds, "several seeds: --out is a directory")->delimiter(',');
    gen->add_option("--out", gen_out, "output file or directory")->required();

    // game run
    auto* game = app.add_subcommand("game", "single embedded game");
    game->require_subcommand(1);
    auto* run = game->add_subcommand("run", "scan one path on one grid and run the beta-binomial strategy");
    cli::GameRunConfig gcfg;
    SpecFlags game_spec;
    std::optional<fs::path> game_path, game_out, game_hits, game_table;
    std::optional<double> game_t2;
    add_spec_flags(run, game_spec);
    run->add_option("--path", game_path, "price path file (overrides the generator flags)")->check(CLI::ExistingFile);
    run->add_option("--a1", gcfg.a_up, "up-scale base")->capture_default_str();
    run->add_option("--a2", gcfg.a_down, "down-scale base")->capture_default_str();
    run->add_option("--k", gcfg.k, "scale index")->capture_default_str();
    run->add_option("--delta-up", gcfg.delta_up, "explicit delta_1");
    run->add_option("--delta-down", gcfg.delta_down, "explicit delta_2");
    run->add_option("--alpha", gcfg.prior.alpha, "Beta prior alpha")->capture_default_str();
    run->add_option("--beta", gcfg.prior.beta, "Beta prior beta")->capture_default_str();
    run->add_option("--t1", gcfg.t_from, "window start")->capture_default_str();
    run->add_option("--t2", game_t2, "window end (default: path horizon)");
    run->add_option("--max-rounds", gcfg.max_rounds, "round budget")->capture_default_str();
    run->add_option("--out", game_out, "JSON report (default: stdout)");
    run->add_option("--hits", game_hits, "hit sequence export");
    run->add_option("--table", game_table, "one-row comma-separated summary");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep of the multiscale ladder over fBm seeds");
    cli::SweepConfig scfg;
    std::optional<double> sweep_t2;
    std::vector<std::uint64_t> sweep_seeds;
    std::size_t sweep_count = 10;
    std::uint64_t sweep_base = 1;
    std::optional<fs::path> sweep_out, sweep_runs, sweep_agg;
    scfg.base.n_points = (1u << 16) + 1;
    sweep->add_option("--hurst", scfg.hursts, "Hurst exponents")->delimiter(',')->capture_default_str();
    sweep->add_option("--sigma", scfg.base.sigma, "fBm scale")->capture_default_str();
    sweep->add_option("--horizon", scfg.base.horizon, "T")->capture_default_str();
    sweep->add_option("--points", scfg.base.n_points, "grid points")->capture_default_str();
    sweep->add_option("--s0", scfg.base.initial_price, "S(0)")->capture_default_str();
    sweep->add_option("--seeds", sweep_seeds, "explicit seed list")->delimiter(',');
    sweep->add_option("--count", sweep_count, "number of seeds when no list is given")->capture_default_str();
    sweep->add_option("--base-seed", sweep_base, "first seed when no list is given")->capture_default_str();
    sweep->add_option("--min-abs-move", scfg.min_abs_move, "keep seeds with |L(T)| >= this")->capture_default_str();
    add_ladder_flags(sweep, scfg.ladder, sweep_t2);
    sweep->add_option("--out", sweep_out, "JSON report (default: stdout)");
    sweep->add_option("--runs-table", sweep_runs, "per-run rows");
    sweep->add_option("--table", sweep_agg, "per-(H,k) aggregate rows");

    // force run
    auto* force = app.add_subcommand("force", "forcing constructions");
    force->require_subcommand(1);
    auto* frun = force->add_subcommand("run", "two-account split and dyadic account ladder on one path");
    cli::ForceConfig fcfg;
    SpecFlags force_spec;
    std::optional<fs::path> force_path, force_out;
    std::optional<double> force_t2;
    add_spec_flags(frun, force_spec);
    frun->add_option("--path", force_path, "price path file")->check(CLI::ExistingFile);
    add_ladder_flags(frun, fcfg.ladder, force_t2);
    frun->add_option("--A", fcfg.ladder.range, "range threshold A")->capture_default_str();
    frun->add_option("--C", fcfg.ladder.target, "capital target C")->capture_default_str();
    frun->add_option("--accounts", fcfg.ladder.accounts, "ladder accounts N")->capture_default_str();
    frun->add_option("--ledger-samples", fcfg.ladder.ledger_samples, "ledger time axis size")->capture_default_str();
    frun->add_option("--out", force_out, "JSON report (default: stdout)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "p-variation, variation exponent and event checks");
    cli::AnalyzeConfig acfg;
    SpecFlags an_spec;
    std::optional<fs::path> an_path, an_out;
    add_spec_flags(analyze, an_spec);
    analyze->add_option("--path", an_path, "price path file")->check(CLI::ExistingFile);
    analyze->add_option("--t1", acfg.t_from, "window start")->capture_default_str();
    analyze->add_option("--t2", acfg.t_to, "window end");
    analyze->add_option("--p", acfg.p_values, "exponents for p-variation")->delimiter(',')->capture_default_str();
    analyze->add_option("--max-depth", acfg.max_depth, "deepest dyadic level (-1: grid limit)")->capture_default_str();
    analyze->add_option("--holder-h", acfg.holder_h, "Hölder exponent for the event checks");
    analyze->add_option("--holder-c", acfg.holder_c, "Hölder constant for the event checks");
    analyze->add_option("--A", acfg.range, "range threshold");
    analyze->add_option("--out", an_out, "JSON report (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    auto emit = [](const std::optional<fs::path>& dest, const std::string& text) {
        if (dest) write_text(*dest, text);
        else std::cout << text;
    };

    try {
        if (*gen) {
            cli::PathsGenConfig c{resolve(gen_spec), gen_seeds, gen_out};
            for (const auto& f : cli::cmd_paths_gen(c)) std::cerr << "wrote " << f.string() << '\n';
        } else if (*run) {
            gcfg.source = {game_path, resolve(game_spec)};
            gcfg.t_to = game_t2;
            for (const auto& p : {game_out, game_hits, game_table}) cli::check_output(p);
            auto out = cli::cmd_game_run(gcfg);
            if (game_hits)
                write_atomically(*game_hits, [&](std::ostream& o) { write_hits(out.hits, o); });
            if (game_table) write_text(*game_table, out.table);
            emit(game_out, cli::to_text(out.report));
        } else if (*sweep) {
            scfg.seeds = seed_list(sweep_seeds, sweep_count, sweep_base);
            scfg.ladder.t_to = sweep_t2;
            for (const auto& p : {sweep_out, sweep_runs, sweep_agg}) cli::check_output(p);
            auto out = cli::cmd_sweep(scfg);
            if (sweep_runs) write_text(*sweep_runs, out.runs_table);
            if (sweep_agg) write_text(*sweep_agg, out.aggregate_table);
            emit(sweep_out, cli::to_text(out.report));
        } else if (*frun) {
            fcfg.source = {force_path, resolve(force_spec)};
            fcfg.ladder.t_to = force_t2;
            cli::check_output(force_out);
            emit(force_out, cli::to_text(cli::cmd_force(fcfg)));
        } else if (*analyze) {
            acfg.source = {an_path, resolve(an_spec)};
            cli::check_output(an_out);
            emit(an_out, cli::to_text(cli::cmd_analyze(acfg)));
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
