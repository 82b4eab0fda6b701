#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gwh/rng.hpp"

namespace gwh {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty range");
    double s = 0.0, c = 0.0;
    for (double x : xs) {  // Kahan; pools run to 1e6 entries
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s / static_cast<double>(xs.size());
}

inline double variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance needs >= 2 values");
    double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

inline double stddev(std::span<const double> xs) { return std::sqrt(variance(xs)); }

inline double std_error(std::span<const double> xs) {
    return stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

// Streaming mean/variance (Welford).
struct MeanVar {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double var() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double sd() const { return std::sqrt(var()); }
    double se() const { return n > 0 ? sd() / std::sqrt(static_cast<double>(n)) : 0.0; }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

struct Boot {
    Interval ci;   // percentile interval
    double sd = 0.0;  // bootstrap standard deviation of the statistic
};

// Percentile bootstrap for a statistic of column means.  All columns must
// have the same length and represent aligned records; each replicate draws
// one index resample shared by every column, so correlations between columns
// (e.g. numerator and denominator built from the same draws) are preserved.
Boot bootstrap_fn_ci(const std::vector<std::span<const double>>& cols,
                     const std::function<double(const double*)>& stat_of_means,
                     int b_reps, Rng rng, double level = 0.95);

inline Boot bootstrap_mean_ci(std::span<const double> xs, int b_reps, Rng rng,
                              double level = 0.95) {
    return bootstrap_fn_ci({xs}, [](const double* m) { return m[0]; }, b_reps, rng,
                           level);
}

inline Boot bootstrap_ratio_ci(std::span<const double> num,
                               std::span<const double> den, int b_reps, Rng rng,
                               double level = 0.95) {
    return bootstrap_fn_ci({num, den}, [](const double* m) { return m[0] / m[1]; },
                           b_reps, rng, level);
}

inline constexpr int kBootstrapDefault = 200;

// Upper-tail chi-square test against given cell probabilities; expects raw
// counts.  Returns the p-value via the regularized upper incomplete gamma.
double chi_square_pvalue(std::span<const std::int64_t> counts,
                         std::span<const double> probs);

// Two-sided Kolmogorov-Smirnov test of xs against the unit exponential.
double ks_exp1_pvalue(std::span<const double> xs);

double upper_incomplete_gamma_regularized(double s, double x);

}  // namespace gwh
