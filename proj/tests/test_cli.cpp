#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "ctgame/cli.hpp"

using namespace ctgame;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() : dir_(fs::temp_directory_path() / ("ctgame_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~TempDir() { fs::remove_all(dir_); }
    fs::path operator/(const std::string& name) const { return dir_ / name; }
    const fs::path& path() const { return dir_; }

private:
    fs::path dir_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CTGAME_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

PathSpec linear_spec() {
    PathSpec s;
    s.kind = PathKind::log_linear;
    s.slope = 1.0;
    s.n_points = 9;
    return s;
}

}  // namespace

TEST(PathsGen, ConstantFile) {
    TempDir tmp;
    PathSpec s;
    s.kind = PathKind::constant;
    s.initial_price = 5.0;
    s.n_points = 17;
    cli::cmd_paths_gen({s, {}, tmp / "c.csv"});
    const auto p = read_path(tmp / "c.csv");
    for (double v : p.prices()) EXPECT_EQ(v, 5.0);
}

TEST(PathsGen, ByteIdenticalReruns) {
    TempDir tmp;
    PathSpec s;
    s.hurst = 0.35;
    s.seed = 42;
    s.n_points = 2049;
    cli::cmd_paths_gen({s, {}, tmp / "a.csv"});
    cli::cmd_paths_gen({s, {}, tmp / "b.csv"});
    EXPECT_EQ(slurp(tmp / "a.csv"), slurp(tmp / "b.csv"));
}

TEST(PathsGen, SeveralSeedsIntoDirectory) {
    TempDir tmp;
    PathSpec s;
    s.n_points = 129;
    const auto files = cli::cmd_paths_gen({s, {3, 4, 5}, tmp.path()});
    ASSERT_EQ(files.size(), 3u);
    for (const auto& f : files) EXPECT_TRUE(fs::exists(f));
    EXPECT_NE(slurp(files[0]), slurp(files[1]));
}

TEST(PathsGen, InvalidSpecRejectedBeforeWriting) {
    TempDir tmp;
    PathSpec s;
    s.hurst = 1.2;
    EXPECT_THROW(cli::cmd_paths_gen({s, {}, tmp / "x.csv"}), ValidationError);
    EXPECT_FALSE(fs::exists(tmp / "x.csv"));
}

TEST(GameRun, ConstantPath) {
    cli::GameRunConfig cfg;
    cfg.source.spec.kind = PathKind::constant;
    const auto out = cli::cmd_game_run(cfg);
    EXPECT_EQ(out.report["summary"]["n_star"], 0);
    EXPECT_EQ(out.report["capital"]["log_capital_horizon"].get<double>(), 0.0);
    EXPECT_TRUE(out.report["prediction"].is_null());
}

TEST(GameRun, LogLinearEighthGrid) {
    cli::GameRunConfig cfg;
    cfg.source.spec = linear_spec();
    cfg.delta_up = std::expm1(0.125);
    cfg.delta_down = std::expm1(0.125);
    const auto out = cli::cmd_game_run(cfg);
    EXPECT_EQ(out.report["summary"]["n_star"], 8);
    EXPECT_EQ(out.report["summary"]["heads"], 8);
    for (auto x : out.hits.outcomes) EXPECT_EQ(x, Outcome::up);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(out.hits.times[i], (i + 1) / 8.0, 1e-12);
}

TEST(GameRun, ReportSatisfiesRoundIdentity) {
    cli::GameRunConfig cfg;
    cfg.source.spec.hurst = 0.4;
    cfg.source.spec.seed = 8;
    cfg.source.spec.n_points = 8193;
    cfg.a_up = 2.0;
    cfg.a_down = 3.0;
    cfg.k = 3;
    const auto r = cli::cmd_game_run(cfg).report;
    const double e1 = r["grid"]["eta_up"], e2 = r["grid"]["eta_down"];
    const double tv = r["summary"]["total_variation"], sigma = r["summary"]["sigma"];
    const double n = (e1 + e2 - sigma * (e1 - e2)) / (2.0 * e1 * e2) * tv;
    EXPECT_NEAR(n, r["summary"]["n_star"].get<double>(), 1e-9 * n);
    EXPECT_NEAR(r["capital"]["closed_form"].get<double>(), r["capital"]["log_capital_completed"].get<double>(), 1e-8);
}

TEST(GameRun, TableRow) {
    cli::GameRunConfig cfg;
    cfg.source.spec = linear_spec();
    cfg.k = 3;
    const auto out = cli::cmd_game_run(cfg);
    EXPECT_EQ(out.table.substr(0, out.table.find('\n')), "k,n_star,h,t,TV,L,sigma,p,logK_exact,logK_stirling,logK_regime");
    EXPECT_EQ(out.table.substr(out.table.find('\n') + 1, 10), "3,8,8,0,1,");
}

TEST(GameRun, MismatchedDeltas) {
    cli::GameRunConfig cfg;
    cfg.delta_up = 0.1;
    EXPECT_THROW(cli::cmd_game_run(cfg), ConfigError);
}

TEST(Sweep, SingleSeedEqualsSingleRun) {
    cli::SweepConfig cfg;
    cfg.hursts = {0.4};
    cfg.seeds = {17};
    cfg.base.n_points = 4097;
    cfg.ladder.k_min = 2;
    cfg.ladder.k_max = 4;
    const auto out = cli::cmd_sweep(cfg);
    PathSpec s = cfg.base;
    s.hurst = 0.4;
    s.seed = 17;
    const auto single = run_multiscale(generate(s), cfg.ladder);
    const auto& scales = out.report["results"][0]["scales"];
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(scales[i]["log_capital"]["median"].get<double>(), single.scales[i].log_capital);
        EXPECT_EQ(scales[i]["n_star_median"].get<double>(), static_cast<double>(single.scales[i].summary.n_star));
    }
}

TEST(Sweep, SeedOrderIrrelevant) {
    cli::SweepConfig cfg;
    cfg.hursts = {0.5, 0.3};
    cfg.base.n_points = 2049;
    cfg.ladder.k_min = 2;
    cfg.ladder.k_max = 3;
    cfg.seeds = {5, 1, 9, 2};
    const auto a = cli::cmd_sweep(cfg);
    cfg.seeds = {9, 2, 5, 1};
    const auto b = cli::cmd_sweep(cfg);
    EXPECT_EQ(a.report.dump(), b.report.dump());
    EXPECT_EQ(a.aggregate_table, b.aggregate_table);
    EXPECT_EQ(a.runs_table, b.runs_table);
}

TEST(Sweep, EmptySeedListRejected) {
    cli::SweepConfig cfg;
    EXPECT_THROW(cli::cmd_sweep(cfg), ConfigError);
}

TEST(Sweep, SkippedScalesReported) {
    cli::SweepConfig cfg;
    cfg.seeds = {1, 2};
    cfg.base.n_points = 2049;
    cfg.ladder.k_min = 1;
    cfg.ladder.k_max = 6;
    cfg.ladder.max_rounds = 200;
    const auto out = cli::cmd_sweep(cfg);
    const auto& last = out.report["results"][0]["scales"][5];
    EXPECT_EQ(last["skipped"], 2);
    EXPECT_EQ(last["runs"], 0);
}

TEST(Force, ConstantPathNoFreeze) {
    cli::ForceConfig cfg;
    cfg.source.spec.kind = PathKind::constant;
    cfg.ladder.accounts = 4;
    const auto r = cli::cmd_force(cfg);
    EXPECT_EQ(r["ledger"]["frozen"], 0);
    EXPECT_TRUE(r["witness_k"].is_null());
}

TEST(Force, RoundTripGuaranteeFlag) {
    TempDir tmp;
    {
        std::ofstream f(tmp / "rt.csv");
        f.precision(17);
        f << "time,price\n";
        for (int i = 0; i <= 100; ++i) {
            const double t = i / 100.0;
            const double lp = t <= 0.5 ? 1.6 * t : 1.6 * (1.0 - t);
            f << t << ',' << std::exp(lp) << '\n';
        }
    }
    cli::ForceConfig cfg;
    cfg.source.file = tmp / "rt.csv";
    cfg.ladder.range = 1.0;
    cfg.ladder.k_min = 2;
    cfg.ladder.k_max = 4;
    cfg.ladder.accounts = 3;
    const auto r = cli::cmd_force(cfg);
    EXPECT_TRUE(r["two_account"]["range_exceeded"].get<bool>() == false);  // range 0.8 <= A
    EXPECT_TRUE(r["two_account"]["guarantee_holds"].get<bool>());
    EXPECT_NEAR(r["two_account"]["exit_time"].get<double>(), 0.3125, 1e-9);
}

TEST(Force, DeterministicReport) {
    cli::ForceConfig cfg;
    cfg.source.spec.hurst = 0.3;
    cfg.source.spec.seed = 4;
    cfg.source.spec.n_points = 8193;
    cfg.ladder.k_min = 1;
    cfg.ladder.k_max = 3;
    cfg.ladder.accounts = 3;
    EXPECT_EQ(cli::cmd_force(cfg).dump(), cli::cmd_force(cfg).dump());
}

TEST(Analyze, SinusoidAndEvents) {
    cli::AnalyzeConfig cfg;
    cfg.source.spec.kind = PathKind::sinusoid;
    cfg.source.spec.amplitude = 0.5;
    cfg.source.spec.n_points = 4097;
    cfg.p_values = {1.0, 2.0};
    cfg.holder_h = 1.0;
    cfg.holder_c = 4.0;
    cfg.range = 0.9;
    const auto r = cli::cmd_analyze(cfg);
    EXPECT_LE(r["vex"].get<double>(), 1.2);
    EXPECT_NEAR(r["p_variation"][0]["estimate"].get<double>(), 2.0, 1e-6);  // 4 * amplitude
    EXPECT_TRUE(r["events"]["upper"].get<bool>());  // Lipschitz constant pi
    EXPECT_FALSE(r["events"]["range"].get<bool>());
}

TEST(Analyze, RejectsBadP) {
    cli::AnalyzeConfig cfg;
    cfg.source.spec.kind = PathKind::constant;
    cfg.p_values = {0.5};
    EXPECT_THROW(cli::cmd_analyze(cfg), DomainError);
}

TEST(Provenance, HashTracksConfig) {
    cli::GameRunConfig a;
    a.source.spec = linear_spec();
    auto b = a;
    b.k = 5;
    const auto ra = cli::cmd_game_run(a).report["provenance"];
    const auto rb = cli::cmd_game_run(b).report["provenance"];
    EXPECT_NE(ra["config_hash"], rb["config_hash"]);
    EXPECT_EQ(ra["version"], kVersion);
    EXPECT_EQ(ra["config_hash"], cli::cmd_game_run(a).report["provenance"]["config_hash"]);
}

TEST(Executable, ExitCodes) {
    TempDir tmp;
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli("paths gen --kind constant --points 5 --out " + (tmp / "c.csv").string()), 0);
    EXPECT_EQ(run_cli("paths gen --kind nonsense --out " + (tmp / "d.csv").string()), 1);
    EXPECT_FALSE(fs::exists(tmp / "d.csv"));
    EXPECT_EQ(run_cli("game run --path " + (tmp / "missing.csv").string()), 1);
    EXPECT_EQ(run_cli("game run --bogus-flag 3"), 1);
    EXPECT_EQ(run_cli("sweep --seeds 1 --points 3 --kmax 2 --hurst 1.5"), 1);
    EXPECT_EQ(run_cli("game run --kind constant --out " + (tmp / "no_such_dir" / "r.json").string()), 1);
    {
        std::ofstream bad(tmp / "bad.csv");
        bad << "time,price\n0,1\n1,-3\n";
    }
    EXPECT_EQ(run_cli("analyze --path " + (tmp / "bad.csv").string()), 1);
    EXPECT_EQ(run_cli("game run --kind constant --points 5 --out " + (tmp / "r.json").string()), 0);
    EXPECT_TRUE(fs::exists(tmp / "r.json"));
}

TEST(Executable, ConfigFileWithFlagOverride) {
    TempDir tmp;
    {
        std::ofstream ini(tmp / "run.ini");
        ini << "[game.run]\nkind = \"log_linear\"\nslope = 1.0\npoints = 9\nk = 2\n";
    }
    const auto ini = (tmp / "run.ini").string();
    ASSERT_EQ(run_cli("--config " + ini + " game run --out " + (tmp / "a.json").string()), 0);
    ASSERT_EQ(run_cli("--config " + ini + " game run --k 3 --out " + (tmp / "b.json").string()), 0);
    const auto a = Json::parse(slurp(tmp / "a.json"));
    const auto b = Json::parse(slurp(tmp / "b.json"));
    EXPECT_EQ(a["summary"]["n_star"], 4);
    EXPECT_EQ(b["summary"]["n_star"], 8);
}

TEST(Executable, ByteIdenticalReports) {
    TempDir tmp;
    const std::string args = "force run --kind fbm --hurst 0.3 --seed 3 --points 4097 --kmin 1 --kmax 3 --accounts 3 --out ";
    ASSERT_EQ(run_cli(args + (tmp / "a.json").string()), 0);
    ASSERT_EQ(run_cli(args + (tmp / "b.json").string()), 0);
    EXPECT_EQ(slurp(tmp / "a.json"), slurp(tmp / "b.json"));
}
