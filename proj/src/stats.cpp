#include "gwh/stats.hpp"

#include <algorithm>
#include <cmath>

namespace gwh {

Boot bootstrap_fn_ci(const std::vector<std::span<const double>>& cols,
                     const std::function<double(const double*)>& stat_of_means,
                     int b_reps, Rng rng, double level) {
    if (cols.empty()) throw std::invalid_argument("bootstrap needs columns");
    const std::size_t n = cols[0].size();
    for (const auto& c : cols)
        if (c.size() != n) throw std::invalid_argument("bootstrap columns misaligned");
    if (n == 0) throw std::invalid_argument("bootstrap of empty columns");

    const std::size_t k = cols.size();
    std::vector<double> sums(k);
    std::vector<double> means(k);
    std::vector<double> stats(static_cast<std::size_t>(b_reps));
    for (int b = 0; b < b_reps; ++b) {
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t j = rng.below(n);
            for (std::size_t c = 0; c < k; ++c) sums[c] += cols[c][j];
        }
        for (std::size_t c = 0; c < k; ++c)
            means[c] = sums[c] / static_cast<double>(n);
        stats[static_cast<std::size_t>(b)] = stat_of_means(means.data());
    }
    Boot out;
    out.sd = stats.size() > 1 ? stddev(stats) : 0.0;
    std::sort(stats.begin(), stats.end());
    double tail = (1.0 - level) / 2.0;
    auto pick = [&](double q) {
        double pos = q * static_cast<double>(b_reps - 1);
        std::size_t i = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(i);
        if (i + 1 >= stats.size()) return stats.back();
        return stats[i] * (1.0 - frac) + stats[i + 1] * frac;
    };
    out.ci = Interval{pick(tail), pick(1.0 - tail)};
    return out;
}

// Regularized upper incomplete gamma Q(s,x), via the series for the lower
// function when x < s+1 and the continued fraction otherwise.
double upper_incomplete_gamma_regularized(double s, double x) {
    if (x < 0.0 || s <= 0.0) throw std::invalid_argument("gamma_q domain");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) {
        double term = 1.0 / s;
        double sum = term;
        double a = s;
        for (int i = 0; i < 10000; ++i) {
            a += 1.0;
            term *= x / a;
            sum += term;
            if (term < sum * 1e-16) break;
        }
        double logp = s * std::log(x) - x - std::lgamma(s) + std::log(sum);
        return 1.0 - std::exp(logp);
    }
    // Lentz continued fraction for Q.
    double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    double logq = s * std::log(x) - x - std::lgamma(s) + std::log(h);
    return std::exp(logq);
}

double chi_square_pvalue(std::span<const std::int64_t> counts,
                         std::span<const double> probs) {
    if (counts.size() != probs.size() || counts.empty())
        throw std::invalid_argument("chi_square: size mismatch");
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    if (total <= 0) throw std::invalid_argument("chi_square: no observations");
    double stat = 0.0;
    std::size_t dof = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double e = probs[i] * static_cast<double>(total);
        if (e <= 0.0) {
            if (counts[i] != 0)
                return 0.0;  // mass observed where the model puts none
            continue;
        }
        double d = static_cast<double>(counts[i]) - e;
        stat += d * d / e;
        ++dof;
    }
    if (dof < 2) return 1.0;
    return upper_incomplete_gamma_regularized(static_cast<double>(dof - 1) / 2.0,
                                              stat / 2.0);
}

double ks_exp1_pvalue(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("ks test of empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double cdf = 1.0 - std::exp(-v[i]);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        dmax = std::max(dmax, std::max(std::fabs(cdf - lo), std::fabs(hi - cdf)));
    }
    // Asymptotic Kolmogorov tail with the Stephens small-sample adjustment.
    double t = dmax * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
    double p = 0.0;
    for (int j = 1; j <= 100; ++j) {
        double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) *
                      std::exp(-2.0 * t * t * static_cast<double>(j) *
                               static_cast<double>(j));
        p += term;
        if (std::fabs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace gwh
