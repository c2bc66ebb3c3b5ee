#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ctgame/detail/fft.hpp"
#include "ctgame/error.hpp"
#include "ctgame/price_path.hpp"

namespace ctgame {

enum class PathKind { fbm, constant, log_linear, sinusoid, weierstrass };

inline std::string_view to_string(PathKind k) {
    switch (k) {
        case PathKind::fbm: return "fbm";
        case PathKind::constant: return "constant";
        case PathKind::log_linear: return "log_linear";
        case PathKind::sinusoid: return "sinusoid";
        case PathKind::weierstrass: return "weierstrass";
    }
    return "?";
}

inline PathKind parse_path_kind(std::string_view s) {
    for (auto k : {PathKind::fbm, PathKind::constant, PathKind::log_linear, PathKind::sinusoid,
                   PathKind::weierstrass})
        if (to_string(k) == s) return k;
    throw ValidationError("unknown path kind '" + std::string(s) + "'");
}

/// Everything needed to reproduce a generated path, seed included.
struct PathSpec {
    PathKind kind = PathKind::fbm;
    double hurst = 0.5;
    double sigma = 1.0;
    double horizon = 1.0;
    std::size_t n_points = 1025;
    double initial_price = 1.0;
    std::uint64_t seed = 0;

    double slope = 0.0;      // log_linear: log S(t) = log S(0) + slope * t
    double amplitude = 0.0;  // sinusoid: amplitude * sin(2 pi frequency t)
    double frequency = 1.0;
    double weierstrass_base = 2.0;
    double weierstrass_holder = 0.5;

    void validate() const {
        if (!(hurst > 0.0 && hurst < 1.0)) throw ValidationError("path spec: hurst must lie in (0,1)");
        if (!(sigma >= 0.0) || !std::isfinite(sigma))
            throw ValidationError("path spec: sigma must be finite and >= 0");
        if (!(horizon > 0.0) || !std::isfinite(horizon))
            throw ValidationError("path spec: horizon must be finite and > 0");
        if (n_points < 2) throw ValidationError("path spec: n_points must be >= 2");
        if (!(initial_price > 0.0) || !std::isfinite(initial_price))
            throw ValidationError("path spec: initial price must be finite and > 0");
        if (!std::isfinite(slope) || !std::isfinite(amplitude) || !std::isfinite(frequency))
            throw ValidationError("path spec: non-finite shape parameter");
        if (kind == PathKind::weierstrass) {
            if (!(weierstrass_base > 1.0)) throw ValidationError("path spec: weierstrass base must be > 1");
            if (!(weierstrass_holder > 0.0 && weierstrass_holder < 1.0))
                throw ValidationError("path spec: weierstrass holder exponent must lie in (0,1)");
        }
    }
};

inline std::vector<double> uniform_grid(std::size_t n_points, double horizon) {
    std::vector<double> t(n_points);
    const double last = static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) t[i] = (static_cast<double>(i) / last) * horizon;
    return t;
}

namespace detail {

// prices s0 * exp(x): exact s0 wherever x == 0
inline PricePath scaled_path(std::vector<double> times, double s0, const std::vector<double>& x) {
    std::vector<double> prices(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) prices[i] = x[i] == 0.0 ? s0 : s0 * std::exp(x[i]);
    return PricePath::from_prices(std::move(times), std::move(prices));
}

}  // namespace detail

/// Autocovariance of unit-spacing fractional Gaussian noise at integer lag k.
inline double fgn_autocovariance(std::size_t k, double hurst) {
    const double h2 = 2.0 * hurst;
    const double kk = static_cast<double>(k);
    if (k == 0) return 1.0;
    return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(kk - 1.0, h2));
}

struct FbmOptions {
    bool force_dense = false;
    std::size_t dense_limit = std::size_t{1} << 12;
};

/// Exact sampler of fractional Gaussian noise of fixed length.
///
/// Uses circulant embedding of the Toeplitz covariance into a circulant of
/// size 2m (m = next power of two >= n). The eigenvalues are computed once per
/// sampler; each draw costs one FFT. If the embedding is not positive
/// semidefinite, a dense Cholesky factor is used for n <= dense_limit.
class FgnSampler {
public:
    FgnSampler(std::size_t n, double hurst, FbmOptions opts = {}) : n_(n), hurst_(hurst) {
        if (n == 0) throw ValidationError("fgn: length must be positive");
        if (!(hurst > 0.0 && hurst < 1.0)) throw ValidationError("fgn: hurst must lie in (0,1)");
        if (!opts.force_dense && build_circulant()) return;
        if (n > opts.dense_limit)
            throw NumericalError("fgn: circulant embedding is not positive semidefinite and n=" +
                                 std::to_string(n) + " exceeds the dense fallback limit");
        build_dense();
    }

    bool uses_dense() const noexcept { return fft_ == nullptr; }
    std::size_t size() const noexcept { return n_; }

    template <class Rng>
    std::vector<double> sample(Rng& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> out(n_);
        if (fft_) {
            auto buf = fft_->data();
            for (std::size_t j = 0; j < buf.size(); ++j) {
                double re = normal(rng);
                double im = normal(rng);
                buf[j] = sqrt_eig_[j] * std::complex<double>(re, im);
            }
            fft_->execute();
            for (std::size_t i = 0; i < n_; ++i) out[i] = buf[i].real();
        } else {
            Eigen::VectorXd z(static_cast<Eigen::Index>(n_));
            for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
            Eigen::VectorXd x = chol_ * z;
            std::copy(x.data(), x.data() + x.size(), out.begin());
        }
        return out;
    }

private:
    bool build_circulant() {
        const std::size_t m = std::bit_ceil(n_);
        const std::size_t size = 2 * m;
        auto fft = std::make_unique<detail::ForwardFft>(size);
        auto buf = fft->data();
        for (std::size_t j = 0; j <= m; ++j) buf[j] = fgn_autocovariance(j, hurst_);
        for (std::size_t j = 1; j < m; ++j) buf[size - j] = buf[j];
        fft->execute();
        double max_eig = 0.0;
        double min_eig = 0.0;
        for (auto v : buf) {
            max_eig = std::max(max_eig, v.real());
            min_eig = std::min(min_eig, v.real());
        }
        if (min_eig < -1e-10 * max_eig) return false;
        sqrt_eig_.resize(size);
        const double scale = 1.0 / static_cast<double>(size);
        for (std::size_t j = 0; j < size; ++j)
            sqrt_eig_[j] = std::sqrt(std::max(0.0, buf[j].real()) * scale);
        fft_ = std::move(fft);
        return true;
    }

    void build_dense() {
        const auto n = static_cast<Eigen::Index>(n_);
        Eigen::MatrixXd cov(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                cov(i, j) = fgn_autocovariance(static_cast<std::size_t>(std::abs(i - j)), hurst_);
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) throw NumericalError("fgn: dense Cholesky factorization failed");
        chol_ = llt.matrixL();
    }

    std::size_t n_;
    double hurst_;
    std::unique_ptr<detail::ForwardFft> fft_;
    std::vector<double> sqrt_eig_;
    Eigen::MatrixXd chol_;
};

/// Reusable fBm path sampler for a fixed (grid, H). Seeds are the only varying input.
class FbmSampler {
public:
    FbmSampler(std::size_t n_points, double hurst, double horizon, FbmOptions opts = {})
        : times_(uniform_grid(n_points, horizon)),
          step_scale_(std::pow(horizon / static_cast<double>(n_points - 1), hurst)),
          fgn_(n_points - 1, hurst, opts) {}

    bool uses_dense() const noexcept { return fgn_.uses_dense(); }

    PricePath sample(std::uint64_t seed, double sigma, double initial_price) {
        std::vector<double> x(times_.size(), 0.0);
        if (sigma != 0.0) {
            std::mt19937_64 rng(seed);
            auto noise = fgn_.sample(rng);
            double level = 0.0;
            const double scale = sigma * step_scale_;
            for (std::size_t i = 0; i < noise.size(); ++i) {
                level += scale * noise[i];
                x[i + 1] = level;
            }
        }
        return detail::scaled_path(times_, initial_price, x);
    }

private:
    std::vector<double> times_;
    double step_scale_;
    FgnSampler fgn_;
};

/// log S(t) = log S(0) + sigma * B_H(t), exact on the uniform grid.
inline PricePath gen_fbm(const PathSpec& spec, FbmOptions opts = {}) {
    spec.validate();
    if (spec.kind != PathKind::fbm) throw ValidationError("gen_fbm: spec.kind must be fbm");
    if (spec.sigma == 0.0) {
        return detail::scaled_path(uniform_grid(spec.n_points, spec.horizon), spec.initial_price,
                                   std::vector<double>(spec.n_points, 0.0));
    }
    FbmSampler sampler(spec.n_points, spec.hurst, spec.horizon, opts);
    return sampler.sample(spec.seed, spec.sigma, spec.initial_price);
}

/// Number of terms (J+1) kept in the Weierstrass sum: the first J with b^{-hJ} < dt.
inline std::size_t weierstrass_terms(double base, double holder, double dt) {
    std::size_t j = 0;
    while (std::pow(base, -holder * static_cast<double>(j)) >= dt) ++j;
    return j + 1;
}

inline PricePath gen_deterministic(const PathSpec& spec) {
    spec.validate();
    auto times = uniform_grid(spec.n_points, spec.horizon);
    std::vector<double> lp(times.size(), 0.0);
    switch (spec.kind) {
        case PathKind::constant:
            break;
        case PathKind::log_linear:
            for (std::size_t i = 0; i < times.size(); ++i) lp[i] = spec.slope * times[i];
            break;
        case PathKind::sinusoid:
            for (std::size_t i = 0; i < times.size(); ++i)
                lp[i] = spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.frequency * times[i]);
            break;
        case PathKind::weierstrass: {
            const double dt = spec.horizon / static_cast<double>(spec.n_points - 1);
            const std::size_t terms =
                weierstrass_terms(spec.weierstrass_base, spec.weierstrass_holder, dt);
            for (std::size_t i = 0; i < times.size(); ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < terms; ++j) {
                    const double jj = static_cast<double>(j);
                    s += std::pow(spec.weierstrass_base, -spec.weierstrass_holder * jj) *
                         std::cos(std::pow(spec.weierstrass_base, jj) * times[i]);
                }
                lp[i] = s;
            }
            break;
        }
        case PathKind::fbm:
            throw ValidationError("gen_deterministic: fbm is not a deterministic kind");
    }
    return detail::scaled_path(std::move(times), spec.initial_price, lp);
}

inline PricePath generate(const PathSpec& spec) {
    return spec.kind == PathKind::fbm ? gen_fbm(spec) : gen_deterministic(spec);
}

}  // namespace ctgame
