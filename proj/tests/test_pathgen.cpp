#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "ctgame/path_io.hpp"
#include "ctgame/pathgen.hpp"
#include "oracles.hpp"

using namespace ctgame;

namespace {

struct MeanSe {
    double mean;
    double se;
};

MeanSe mean_se(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= static_cast<double>(xs.size() - 1);
    return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

double lag1_autocorrelation(std::span<const double> lp) {
    std::vector<double> d(lp.size() - 1);
    for (std::size_t i = 0; i + 1 < lp.size(); ++i) d[i] = lp[i + 1] - lp[i];
    double m = 0.0;
    for (double x : d) m += x;
    m /= static_cast<double>(d.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        den += (d[i] - m) * (d[i] - m);
        if (i + 1 < d.size()) num += (d[i] - m) * (d[i + 1] - m);
    }
    return num / den;
}

PathSpec fbm_spec(double hurst, std::size_t n) {
    PathSpec s;
    s.hurst = hurst;
    s.n_points = n;
    return s;
}

}  // namespace

TEST(GenFbm, ZeroVolatilityIsConstant) {
    auto s = fbm_spec(0.5, 257);
    s.sigma = 0.0;
    s.initial_price = 3.0;
    const auto p = gen_fbm(s);
    for (double v : p.prices()) EXPECT_EQ(v, 3.0);
}

TEST(GenFbm, DeterministicGivenSeed) {
    auto s = fbm_spec(0.3, 5000);
    s.seed = 77;
    EXPECT_EQ(gen_fbm(s), gen_fbm(s));
    auto t = s;
    t.seed = 78;
    EXPECT_FALSE(gen_fbm(s) == gen_fbm(t));
}

TEST(GenFbm, BrownianIncrementsUncorrelated) {
    FbmSampler sampler((1u << 14) + 1, 0.5, 1.0);
    std::vector<double> acs;
    for (std::uint64_t seed = 0; seed < 200; ++seed) acs.push_back(lag1_autocorrelation(sampler.sample(seed, 1.0, 1.0).log_prices()));
    const auto r = mean_se(acs);
    EXPECT_LT(std::abs(r.mean), 3.0 * r.se);
}

TEST(GenFbm, PersistentIncrementCorrelation) {
    const double want = std::pow(2.0, 2.0 * 0.7 - 1.0) - 1.0;
    FbmSampler sampler((1u << 14) + 1, 0.7, 1.0);
    std::vector<double> acs;
    for (std::uint64_t seed = 0; seed < 50; ++seed) acs.push_back(lag1_autocorrelation(sampler.sample(seed, 1.0, 1.0).log_prices()));
    EXPECT_NEAR(mean_se(acs).mean, want, 0.01);
}

TEST(GenFbm, CovarianceMatchesClosedForm) {
    const std::size_t n = 513;
    FbmSampler sampler(n, 0.7, 1.0);
    const std::vector<std::pair<std::size_t, std::size_t>> pairs{
        {16, 16}, {16, 64}, {64, 65}, {100, 400}, {128, 512}, {256, 300}, {300, 500}, {37, 211}, {500, 512}, {1, 512}};
    std::vector<std::vector<double>> prods(pairs.size());
    for (std::uint64_t seed = 1000; seed < 1500; ++seed) {
        const auto p = sampler.sample(seed, 1.0, 1.0);
        const auto lp = p.log_prices();
        for (std::size_t k = 0; k < pairs.size(); ++k) prods[k].push_back(lp[pairs[k].first] * lp[pairs[k].second]);
    }
    const auto ts = uniform_grid(n, 1.0);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto r = mean_se(prods[k]);
        const double want = oracle::fbm_covariance(ts[pairs[k].first], ts[pairs[k].second], 0.7);
        EXPECT_LT(std::abs(r.mean - want), 3.0 * r.se) << "pair " << k;
    }
}

TEST(GenFbm, VarianceSelfSimilar) {
    const std::size_t n = 1025;
    const double hurst = 0.3;
    FbmSampler sampler(n, hurst, 2.0);
    const std::vector<std::size_t> probes{8, 64, 256, 700, 1024};
    std::vector<std::vector<double>> sq(probes.size());
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const auto p = sampler.sample(seed, 1.0, 1.0);
        for (std::size_t k = 0; k < probes.size(); ++k) sq[k].push_back(std::pow(p.log_prices()[probes[k]], 2));
    }
    const auto ts = uniform_grid(n, 2.0);
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const auto r = mean_se(sq[k]);
        EXPECT_LT(std::abs(r.mean - std::pow(ts[probes[k]], 2.0 * hurst)), 3.0 * r.se) << "t=" << ts[probes[k]];
    }
}

TEST(GenFbm, DenseFallbackHasSameCovariance) {
    FbmSampler dense(65, 0.25, 1.0, FbmOptions{.force_dense = true});
    ASSERT_TRUE(dense.uses_dense());
    std::vector<double> prods;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const auto lp = dense.sample(seed, 1.0, 1.0).log_prices();
        prods.push_back(lp[16] * lp[48]);
    }
    const auto r = mean_se(prods);
    EXPECT_LT(std::abs(r.mean - oracle::fbm_covariance(0.25, 0.75, 0.25)), 3.0 * r.se);
}

TEST(GenFbm, CirculantUsedForLargeGrids) {
    FbmSampler s((1u << 12) + 1, 0.8, 1.0);
    EXPECT_FALSE(s.uses_dense());
}

TEST(PathSpec, RejectsInvalid) {
    auto bad = [](auto mutate) {
        PathSpec s;
        mutate(s);
        return s;
    };
    EXPECT_THROW(bad([](PathSpec& s) { s.hurst = 1.0; }).validate(), ValidationError);
    EXPECT_THROW(bad([](PathSpec& s) { s.n_points = 1; }).validate(), ValidationError);
    EXPECT_THROW(bad([](PathSpec& s) { s.horizon = 0.0; }).validate(), ValidationError);
    EXPECT_THROW(bad([](PathSpec& s) { s.initial_price = 0.0; }).validate(), ValidationError);
    EXPECT_THROW(bad([](PathSpec& s) { s.sigma = -1.0; }).validate(), ValidationError);
    EXPECT_THROW(parse_path_kind("brownian"), ValidationError);
}

TEST(GenDeterministic, Constant) {
    PathSpec s;
    s.kind = PathKind::constant;
    const auto p = generate(s);
    for (double v : p.log_prices()) EXPECT_EQ(v, 0.0);
}

TEST(GenDeterministic, LogLinearEndpoint) {
    PathSpec s;
    s.kind = PathKind::log_linear;
    s.slope = 1.0;
    s.initial_price = 2.0;
    const auto p = generate(s);
    EXPECT_DOUBLE_EQ(p.log_prices().back(), std::log(2.0) + 1.0);
    EXPECT_DOUBLE_EQ(p.log_price_at(0.5), std::log(2.0) + 0.5);
}

TEST(GenDeterministic, Sinusoid) {
    PathSpec s;
    s.kind = PathKind::sinusoid;
    s.amplitude = 0.3;
    s.frequency = 2.0;
    s.n_points = 9;
    const auto p = generate(s);
    EXPECT_NEAR(p.log_prices()[1], 0.3, 1e-15);  // t = 1/8: sin(pi/2)
    EXPECT_NEAR(p.log_prices()[3], -0.3, 1e-15);
}

TEST(GenDeterministic, WeierstrassHolderScaling) {
    std::vector<double> r45, r35;
    for (int e = 10; e <= 13; ++e) {
        PathSpec s;
        s.kind = PathKind::weierstrass;
        s.weierstrass_base = 2.0;
        s.weierstrass_holder = 0.4;
        s.n_points = (std::size_t{1} << e) + 1;
        const auto p = generate(s);
        std::vector<double> t(p.times().begin(), p.times().end()), f(p.log_prices().begin(), p.log_prices().end());
        r45.push_back(oracle::holder_ratio(t, f, 0.45));
        r35.push_back(oracle::holder_ratio(t, f, 0.35));
    }
    for (std::size_t i = 1; i < r45.size(); ++i) EXPECT_GT(r45[i], r45[i - 1]);
    EXPECT_GT(r45.back() / r45.front(), 1.08);
    EXPECT_LT(r35.back() / r35.front(), 1.02);
}

TEST(WeierstrassTerms, TruncationRule) {
    // b = 2, h = 0.5, dt = 1/16: 2^{-J/2} < 1/16 first at J = 9.
    EXPECT_EQ(weierstrass_terms(2.0, 0.5, 1.0 / 16.0), 10u);
}

TEST(PricePath, Invariants) {
    EXPECT_THROW(PricePath::from_prices({0.0}, {1.0}), ValidationError);
    EXPECT_THROW(PricePath::from_prices({0.1, 1.0}, {1.0, 1.0}), ValidationError);
    EXPECT_THROW(PricePath::from_prices({0.0, 0.0}, {1.0, 1.0}), ValidationError);
    EXPECT_THROW(PricePath::from_prices({0.0, 1.0}, {1.0, 0.0}), ValidationError);
    EXPECT_THROW(PricePath::from_prices({0.0, 1.0}, {1.0, INFINITY}), ValidationError);
    EXPECT_THROW(PricePath::from_prices({0.0, 1.0}, {1.0}), ValidationError);
}

TEST(PricePath, Interpolation) {
    const auto p = PricePath::from_log_prices({0.0, 1.0, 3.0}, std::vector<double>{0.0, 1.0, -1.0});
    EXPECT_DOUBLE_EQ(p.log_price_at(0.5), 0.5);
    EXPECT_DOUBLE_EQ(p.log_price_at(2.0), 0.0);
    EXPECT_DOUBLE_EQ(p.log_price_at(3.0), -1.0);
    const auto w = window(p, 0.5, 2.5);
    EXPECT_EQ(w.times, (std::vector<double>{0.5, 1.0, 2.5}));
    EXPECT_DOUBLE_EQ(w.log_prices.back(), -0.5);
    EXPECT_THROW(window(p, 0.5, 3.5), ValidationError);
}

TEST(PathIo, RoundTripIsBitExact) {
    auto s = fbm_spec(0.3, 3000);
    s.seed = 5;
    s.initial_price = 123.456;
    const auto p = generate(s);
    std::stringstream ss;
    write_path(p, ss);
    const auto q = read_path(ss);
    EXPECT_TRUE(p == q);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p.log_prices()[i], q.log_prices()[i]);
}

TEST(PathIo, FileRoundTripAndNoTempLeft) {
    const auto dir = std::filesystem::temp_directory_path() / "ctgame_io_test";
    std::filesystem::create_directories(dir);
    const auto f = dir / "p.csv";
    PathSpec s;
    s.kind = PathKind::sinusoid;
    s.amplitude = 0.2;
    write_path(generate(s), f);
    EXPECT_TRUE(read_path(f) == generate(s));
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
    EXPECT_EQ(files, 1u);
    std::filesystem::remove_all(dir);
}

TEST(PathIo, ZeroPriceRejected) {
    std::istringstream in("time,price\n0,1\n0.5,0\n1,2\n");
    try {
        read_path(in);
        FAIL() << "expected a validation error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(PathIo, DecreasingTimeRejected) {
    std::istringstream in("time,price\n0,1\n0.5,1\n0.4,2\n");
    EXPECT_THROW(read_path(in), ValidationError);
}

TEST(PathIo, MalformedRecordReportsLine) {
    std::istringstream in("time,price\n0,1\n0.5;1\n");
    try {
        read_path(in);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    std::istringstream in2("0,1\n1,abc\n");
    EXPECT_THROW(read_path(in2), ParseError);
}

TEST(PathIo, MissingFile) {
    EXPECT_THROW(read_path(std::filesystem::path("/nonexistent/ctgame.csv")), ValidationError);
}
