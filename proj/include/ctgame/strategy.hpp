#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

#include "ctgame/error.hpp"

namespace ctgame {

/// Outcome of one round of the embedded coin-tossing game.
enum class Outcome : std::uint8_t { down = 0, up = 1 };

inline constexpr int bit(Outcome x) noexcept { return x == Outcome::up ? 1 : 0; }

/// Prior pseudo-counts of heads (alpha) and tails (beta).
struct BetaBinomialParams {
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const {
        if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
            throw ValidationError("beta-binomial prior: alpha and beta must be finite and > 0");
    }
};

struct Counts {
    std::size_t heads = 0;
    std::size_t tails = 0;

    std::size_t n() const noexcept { return heads + tails; }

    void add(Outcome x) noexcept { (x == Outcome::up ? heads : tails) += 1; }

    static Counts of(std::span<const Outcome> xs) noexcept {
        Counts c;
        for (auto x : xs) c.add(x);
        return c;
    }
};

/// Posterior predictive probability of a head: (alpha + h) / (alpha + beta + n).
inline double predictive_prob(const BetaBinomialParams& prior, const Counts& c) noexcept {
    return (prior.alpha + static_cast<double>(c.heads)) /
           (prior.alpha + prior.beta + static_cast<double>(c.n()));
}

/// Bet that turns the one-round capital factor into p/rho (head) or (1-p)/(1-rho) (tail).
inline double bet_from_prob(double p_hat, double rho) noexcept {
    return (p_hat - rho) / (rho * (1.0 - rho));
}

/// Kullback-Leibler information D(p || q) of Bernoulli laws, with 0 log 0 = 0.
inline double kl(double p, double q) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("kl: q must lie in (0,1)");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("kl: p must lie in [0,1]");
    double d = 0.0;
    // log1p keeps full relative accuracy when p is close to q.
    if (p > 0.0) d += p * std::log1p((p - q) / q);
    if (p < 1.0) d += (1.0 - p) * std::log1p((q - p) / (1.0 - q));
    return d < 0.0 ? 0.0 : d;
}

/// log of the beta-binomial marginal likelihood Q(x_1...x_n), which depends on
/// the sequence only through its head/tail counts.
inline double log_marginal_likelihood(const Counts& c, const BetaBinomialParams& prior) {
    const double a = prior.alpha;
    const double b = prior.beta;
    const double h = static_cast<double>(c.heads);
    const double t = static_cast<double>(c.tails);
    return (std::lgamma(a + h) - std::lgamma(a)) + (std::lgamma(b + t) - std::lgamma(b)) -
           (std::lgamma(a + b + h + t) - std::lgamma(a + b));
}

/// log K*_n = log Q(x_1...x_n) - h log rho - t log(1 - rho).
inline double closed_form_log_capital(const Counts& c, const BetaBinomialParams& prior, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("closed_form_log_capital: rho must lie in (0,1)");
    if (c.n() == 0) return 0.0;
    return log_marginal_likelihood(c, prior) - static_cast<double>(c.heads) * std::log(rho) -
           static_cast<double>(c.tails) * std::log1p(-rho);
}

inline double closed_form_log_capital(std::span<const Outcome> xs, const BetaBinomialParams& prior,
                                      double rho) {
    return closed_form_log_capital(Counts::of(xs), prior, rho);
}

/// Leading asymptotics n D(h/n || rho) - (1/2) log n of the log capital.
inline double stirling_log_capital(std::size_t n, std::size_t h, double rho) {
    if (n == 0) throw DomainError("stirling_log_capital: n must be >= 1");
    if (h > n) throw DomainError("stirling_log_capital: h must not exceed n");
    const double nn = static_cast<double>(n);
    return nn * kl(static_cast<double>(h) / nn, rho) - 0.5 * std::log(nn);
}

/// Bet policy of the Bayesian investor. Callable as policy(history, counts).
struct BetaBinomialPolicy {
    BetaBinomialParams prior;
    double rho;

    double operator()(std::span<const Outcome> /*history*/, const Counts& c) const noexcept {
        return bet_from_prob(predictive_prob(prior, c), rho);
    }
};

}  // namespace ctgame
