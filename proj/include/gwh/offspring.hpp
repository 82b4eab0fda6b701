#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwh/rng.hpp"

namespace gwh {

// Offspring laws for critical trees with stable branching mechanism of index
// alpha in (1,2].
//
//   theta             theta_alpha(k) = alpha * Gamma(k-alpha) / (k! Gamma(2-alpha)),
//                     k >= 2; at alpha = 2 this degenerates to a point mass at 2.
//   theta1            1/(k(k-1)) for k >= 2, the alpha -> 1 boundary case.
//   size_biased_theta law of (size-biased theta) - 1: pmf (k+1) theta(k+1) / m,
//                     k >= 1, where m = alpha/(alpha-1) is the size-biased mean.
//   rho_canonical     rho(0) = 1/alpha, rho(1) = 0, rho(k) = ((alpha-1)/alpha) theta(k);
//                     critical with generating function r + (1-r)^alpha / alpha.
//   custom            explicit finite pmf table, for tests.
enum class OffspringKind { theta, theta1, size_biased_theta, rho_canonical, custom };

class OffspringDist {
public:
    static OffspringDist theta(double alpha);
    static OffspringDist theta1();
    static OffspringDist size_biased_theta(double alpha);
    static OffspringDist rho_canonical(double alpha);
    static OffspringDist custom(std::vector<double> pmf);

    OffspringKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    std::int64_t support_min() const { return support_min_; }

    // Index of the last cached pmf/cdf entry.  Everything beyond is served by
    // closed-form tail expressions, so no query path truncates the law.
    std::int64_t cache_horizon() const { return horizon_; }

    double pmf(std::int64_t k) const;
    double cdf(std::int64_t k) const;   // P(X <= k)
    double tail(std::int64_t k) const;  // P(X >= k)
    double log_tail(std::int64_t k) const;

    // Probability generating function E[r^X] for r in [0,1], summed from the
    // cached pmf with a closed-form bound on the dropped tail (relative error
    // well under 1e-12).
    double gf(double r) const;
    // Closed form of the generating function; throws for custom tables.
    double gf_closed(double r) const;

    // Mean via cached terms plus the closed tail sum; +infinity where the
    // series diverges (theta1 always, size_biased_theta for alpha < 2).
    double mean_exact() const;
    // Closed form for the tail sum  sum_{j>=k} j pmf(j).
    double mean_tail(std::int64_t k) const;

    // Smallest k with cdf(k) >= u.  Exact inverse of the cached cdf; for u
    // past the cache it switches to the closed-form tail and a bracketed
    // search, so arbitrarily deep quantiles are still exact.
    std::int64_t quantile(double u) const;
    std::int64_t sample(Rng& rng) const { return quantile(rng.u01()); }

    std::string kind_name() const;

private:
    OffspringDist() = default;
    void build_cache();

    OffspringKind kind_ = OffspringKind::custom;
    double alpha_ = 0.0;
    std::int64_t support_min_ = 0;
    std::int64_t horizon_ = 0;
    std::vector<double> pmf_;  // indexed from k = 0
    std::vector<double> cdf_;
};

// theta_alpha(k) by the ratio recursion theta(k+1) = theta(k) (k-alpha)/(k+1)
// started from theta(2) = alpha/2.
double theta_pmf(double alpha, std::int64_t k);
double theta1_pmf(std::int64_t k);

// Mean of the size-biased law, alpha/(alpha-1).
double size_biased_mean(double alpha);

// Quantile coupling across alpha: for fixed u the output is non-increasing in
// alpha, realising the stochastic ordering of the theta family on one
// uniform.
std::int64_t coupled_sample(double u, double alpha);

// Survival probabilities of the canonical critical tree: q_0 = 1 and
// q_j = q_{j-1} - q_{j-1}^alpha / alpha.
struct SurvivalTable {
    double alpha = 0.0;
    std::vector<double> q;  // q[j] = P(tree reaches generation j)

    // q_j * ((alpha-1) j / alpha)^{1/(alpha-1)}; tends to 1 as j grows.
    double asymptotic_ratio(std::int64_t j) const;
};
SurvivalTable survival_probs(double alpha, std::int64_t n);

}  // namespace gwh
