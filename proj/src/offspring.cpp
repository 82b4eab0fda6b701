#include "gwh/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace gwh {

namespace {

constexpr std::int64_t kCacheCap = 65536;
constexpr double kTailStop = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alpha(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0))
        throw std::invalid_argument("alpha must lie in (1,2]");
}

// log theta_alpha(k) through lgamma differences; stable for arbitrary k.
double log_theta(double alpha, std::int64_t k) {
    if (k < 2) return -kInf;
    if (k == 2) return std::log(alpha / 2.0);
    if (alpha == 2.0) return -kInf;
    double kk = static_cast<double>(k);
    return std::log(alpha) + std::lgamma(kk - alpha) - std::lgamma(kk + 1.0) -
           std::lgamma(2.0 - alpha);
}

double theta_closed(double alpha, std::int64_t k) {
    return std::exp(log_theta(alpha, k));
}

}  // namespace

double theta_pmf(double alpha, std::int64_t k) {
    check_alpha(alpha);
    if (k < 2) return 0.0;
    double p = alpha / 2.0;
    for (std::int64_t j = 2; j < k; ++j) {
        p *= (static_cast<double>(j) - alpha) / static_cast<double>(j + 1);
        if (p == 0.0) return 0.0;
    }
    return p;
}

double theta1_pmf(std::int64_t k) {
    if (k < 2) return 0.0;
    return 1.0 / (static_cast<double>(k) * static_cast<double>(k - 1));
}

double size_biased_mean(double alpha) {
    check_alpha(alpha);
    return alpha / (alpha - 1.0);
}

OffspringDist OffspringDist::theta(double alpha) {
    check_alpha(alpha);
    OffspringDist d;
    d.kind_ = OffspringKind::theta;
    d.alpha_ = alpha;
    d.support_min_ = 2;
    d.build_cache();
    return d;
}

OffspringDist OffspringDist::theta1() {
    OffspringDist d;
    d.kind_ = OffspringKind::theta1;
    d.alpha_ = 1.0;
    d.support_min_ = 2;
    d.build_cache();
    return d;
}

OffspringDist OffspringDist::size_biased_theta(double alpha) {
    check_alpha(alpha);
    OffspringDist d;
    d.kind_ = OffspringKind::size_biased_theta;
    d.alpha_ = alpha;
    d.support_min_ = 1;
    d.build_cache();
    return d;
}

OffspringDist OffspringDist::rho_canonical(double alpha) {
    check_alpha(alpha);
    OffspringDist d;
    d.kind_ = OffspringKind::rho_canonical;
    d.alpha_ = alpha;
    d.support_min_ = 0;
    d.build_cache();
    return d;
}

OffspringDist OffspringDist::custom(std::vector<double> pmf) {
    if (pmf.empty()) throw std::invalid_argument("custom pmf: empty table");
    double sum = 0.0;
    for (double p : pmf) {
        if (!(p >= 0.0)) throw std::invalid_argument("custom pmf: negative mass");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("custom pmf: mass does not sum to 1");
    OffspringDist d;
    d.kind_ = OffspringKind::custom;
    d.alpha_ = 0.0;
    d.support_min_ = 0;
    while (d.support_min_ + 1 < static_cast<std::int64_t>(pmf.size()) &&
           pmf[static_cast<std::size_t>(d.support_min_)] == 0.0)
        ++d.support_min_;
    d.pmf_ = std::move(pmf);
    d.horizon_ = static_cast<std::int64_t>(d.pmf_.size()) - 1;
    d.cdf_.resize(d.pmf_.size());
    double run = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < d.pmf_.size(); ++k) {
        double y = d.pmf_[k] - comp;
        double t = run + y;
        comp = (t - run) - y;
        run = t;
        d.cdf_[k] = std::min(run, 1.0);
    }
    return d;
}

// Fill pmf_/cdf_ by the ratio recursion until the closed-form tail beyond the
// cache drops under kTailStop or the cap is reached.  Everything past the
// horizon is served analytically, so the cap introduces no truncation.
void OffspringDist::build_cache() {
    pmf_.assign(static_cast<std::size_t>(support_min_), 0.0);
    const double a = alpha_;
    const double m = (kind_ == OffspringKind::size_biased_theta)
                         ? size_biased_mean(a)
                         : 0.0;

    // th tracks theta_alpha(j) with j advancing via the ratio recursion; each
    // kind maps (j, th) to its own pmf value and closed tail.
    double th = a / 2.0;  // theta(2)
    std::int64_t k = support_min_;
    for (;;) {
        double p = 0.0, tail_next = 0.0;
        switch (kind_) {
            case OffspringKind::theta: {
                p = th;  // k >= 2, th = theta(k)
                double th_next =
                    th * (static_cast<double>(k) - a) / static_cast<double>(k + 1);
                tail_next = static_cast<double>(k + 1) * th_next / a;
                pmf_.push_back(p);
                th = th_next;
                break;
            }
            case OffspringKind::theta1: {
                p = theta1_pmf(k);
                tail_next = 1.0 / static_cast<double>(k);
                pmf_.push_back(p);
                break;
            }
            case OffspringKind::size_biased_theta: {
                // th = theta(k+1) here; entered with k = 1, th = theta(2).
                p = static_cast<double>(k + 1) * th / m;
                double th_next =
                    th * (static_cast<double>(k + 1) - a) / static_cast<double>(k + 2);
                tail_next = static_cast<double>(k + 1) *
                            static_cast<double>(k + 2) * th_next / a;
                pmf_.push_back(p);
                th = th_next;
                break;
            }
            case OffspringKind::rho_canonical: {
                if (k == 0) {
                    p = 1.0 / a;
                    tail_next = 1.0 - 1.0 / a;
                } else if (k == 1) {
                    p = 0.0;
                    tail_next = 1.0 - 1.0 / a;  // P(X >= 2)
                } else {
                    p = (a - 1.0) / a * th;
                    double th_next = th * (static_cast<double>(k) - a) /
                                     static_cast<double>(k + 1);
                    tail_next = (a - 1.0) / a * static_cast<double>(k + 1) *
                                th_next / a;
                    th = th_next;
                }
                pmf_.push_back(p);
                break;
            }
            case OffspringKind::custom:
                throw std::logic_error("custom handled in factory");
        }
        if (tail_next < kTailStop || k + 1 > kCacheCap) break;
        ++k;
    }
    horizon_ = static_cast<std::int64_t>(pmf_.size()) - 1;
    cdf_.resize(pmf_.size());
    double run = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
        double y = pmf_[i] - comp;
        double t = run + y;
        comp = (t - run) - y;
        run = t;
        cdf_[i] = std::min(run, 1.0);
    }
}

double OffspringDist::pmf(std::int64_t k) const {
    if (k < support_min_) return 0.0;
    if (k <= horizon_) return pmf_[static_cast<std::size_t>(k)];
    switch (kind_) {
        case OffspringKind::theta:
            return theta_closed(alpha_, k);
        case OffspringKind::theta1:
            return theta1_pmf(k);
        case OffspringKind::size_biased_theta:
            return static_cast<double>(k + 1) * theta_closed(alpha_, k + 1) /
                   size_biased_mean(alpha_);
        case OffspringKind::rho_canonical:
            return (alpha_ - 1.0) / alpha_ * theta_closed(alpha_, k);
        case OffspringKind::custom:
            return 0.0;
    }
    return 0.0;
}

double OffspringDist::log_tail(std::int64_t k) const {
    if (k <= support_min_) return 0.0;
    double kk = static_cast<double>(k);
    switch (kind_) {
        case OffspringKind::theta:
            // P(X >= k) = k theta(k) / alpha
            return std::log(kk) + log_theta(alpha_, k) - std::log(alpha_);
        case OffspringKind::theta1:
            return -std::log(kk - 1.0);
        case OffspringKind::size_biased_theta:
            // P(X >= k) = k (k+1) theta(k+1) / alpha
            return std::log(kk) + std::log(kk + 1.0) + log_theta(alpha_, k + 1) -
                   std::log(alpha_);
        case OffspringKind::rho_canonical:
            if (k == 1 || k == 2) return std::log1p(-1.0 / alpha_);
            return std::log(alpha_ - 1.0) - std::log(alpha_) + std::log(kk) +
                   log_theta(alpha_, k) - std::log(alpha_);
        case OffspringKind::custom: {
            if (k > horizon_) return -kInf;
            double t = 1.0 - cdf_[static_cast<std::size_t>(k - 1)];
            return t > 0.0 ? std::log(t) : -kInf;
        }
    }
    return -kInf;
}

double OffspringDist::tail(std::int64_t k) const {
    if (k <= support_min_) return 1.0;
    if (kind_ == OffspringKind::custom) {
        if (k > horizon_) return 0.0;
        return std::max(0.0, 1.0 - cdf_[static_cast<std::size_t>(k - 1)]);
    }
    return std::exp(log_tail(k));
}

double OffspringDist::cdf(std::int64_t k) const {
    if (k < support_min_) return 0.0;
    if (k <= horizon_) return cdf_[static_cast<std::size_t>(k)];
    return 1.0 - tail(k + 1);
}

double OffspringDist::gf(double r) const {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("gf: r must be in [0,1]");
    if (r == 1.0) return cdf_[static_cast<std::size_t>(horizon_)] + tail(horizon_ + 1);
    double acc = 0.0, comp = 0.0;
    double rk = 1.0;
    std::int64_t k = 0;
    for (; k <= horizon_; ++k) {
        double term = pmf_[static_cast<std::size_t>(k)] * rk;
        double y = term - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        rk *= r;
        if (k >= support_min_ && rk < 1e-18) return acc;
    }
    // Continue past the cache until the closed-tail remainder is negligible.
    while (tail(k) * rk > 1e-16 && k < (std::int64_t{1} << 40)) {
        acc += pmf(k) * rk;
        rk *= r;
        ++k;
    }
    return acc;
}

double OffspringDist::gf_closed(double r) const {
    if (!(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument("gf_closed: r must be in [0,1]");
    const double s = 1.0 - r;
    switch (kind_) {
        case OffspringKind::theta:
            return (std::pow(s, alpha_) - 1.0 + alpha_ * r) / (alpha_ - 1.0);
        case OffspringKind::theta1:
            return r == 1.0 ? 1.0 : r + s * std::log(s);
        case OffspringKind::size_biased_theta:
            return 1.0 - std::pow(s, alpha_ - 1.0);
        case OffspringKind::rho_canonical:
            return r + std::pow(s, alpha_) / alpha_;
        case OffspringKind::custom:
            throw std::logic_error("gf_closed: no closed form for custom tables");
    }
    return 0.0;
}

double OffspringDist::mean_tail(std::int64_t k) const {
    switch (kind_) {
        case OffspringKind::theta:
            if (k <= 2) return 1.0;
            return static_cast<double>(k) * static_cast<double>(k - 1) *
                   std::exp(log_theta(alpha_, k)) / (alpha_ - 1.0);
        case OffspringKind::theta1:
            return kInf;
        case OffspringKind::size_biased_theta:
            if (alpha_ < 2.0) return kInf;
            return k <= 1 ? 1.0 : 0.0;
        case OffspringKind::rho_canonical:
            if (k <= 2) return 1.0;
            return static_cast<double>(k) * static_cast<double>(k - 1) *
                   std::exp(log_theta(alpha_, k)) / alpha_;
        case OffspringKind::custom: {
            double s = 0.0;
            for (std::int64_t j = std::max<std::int64_t>(k, 0); j <= horizon_; ++j)
                s += static_cast<double>(j) * pmf_[static_cast<std::size_t>(j)];
            return s;
        }
    }
    return 0.0;
}

double OffspringDist::mean_exact() const {
    if (kind_ == OffspringKind::theta1) return kInf;
    if (kind_ == OffspringKind::size_biased_theta && alpha_ < 2.0) return kInf;
    double acc = 0.0, comp = 0.0;
    for (std::int64_t k = support_min_; k <= horizon_; ++k) {
        double term = static_cast<double>(k) * pmf_[static_cast<std::size_t>(k)];
        double y = term - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc + mean_tail(horizon_ + 1);
}

std::int64_t OffspringDist::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("quantile: u must be in (0,1)");
    // Most of the mass sits on the first few atoms; scan those before
    // falling back to binary search.
    std::int64_t scan_end = std::min(horizon_, support_min_ + 8);
    for (std::int64_t k = support_min_; k <= scan_end; ++k)
        if (cdf_[static_cast<std::size_t>(k)] >= u) return k;
    if (u <= cdf_[static_cast<std::size_t>(horizon_)]) {
        auto first = cdf_.begin() + scan_end + 1;
        auto it = std::lower_bound(first, cdf_.end(), u);
        return static_cast<std::int64_t>(it - cdf_.begin());
    }
    if (kind_ == OffspringKind::custom) return horizon_;
    // Deep quantile: smallest k with log P(X >= k+1) <= log(1-u), bracketed
    // by doubling on the closed-form tail.
    const double target = std::log1p(-u);
    std::int64_t lo = horizon_;  // cdf(lo) < u
    std::int64_t hi = 2 * horizon_;
    while (log_tail(hi + 1) > target) {
        lo = hi;
        if (hi > (std::int64_t{1} << 56))
            throw std::runtime_error("quantile: tail search exceeded 2^56");
        hi *= 2;
    }
    while (hi > lo + 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (log_tail(mid + 1) > target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

std::string OffspringDist::kind_name() const {
    switch (kind_) {
        case OffspringKind::theta: return "theta";
        case OffspringKind::theta1: return "theta1";
        case OffspringKind::size_biased_theta: return "size_biased_theta";
        case OffspringKind::rho_canonical: return "rho_canonical";
        case OffspringKind::custom: return "custom";
    }
    return "?";
}

namespace {
const OffspringDist& cached_theta(double alpha) {
    static std::mutex mu;
    static std::map<double, std::unique_ptr<const OffspringDist>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[alpha];
    if (!slot)
        slot = std::make_unique<const OffspringDist>(OffspringDist::theta(alpha));
    return *slot;
}
}  // namespace

std::int64_t coupled_sample(double u, double alpha) {
    return cached_theta(alpha).quantile(u);
}

double SurvivalTable::asymptotic_ratio(std::int64_t j) const {
    if (j <= 0 || j >= static_cast<std::int64_t>(q.size()))
        throw std::out_of_range("asymptotic_ratio: generation out of range");
    double scale = std::pow((alpha - 1.0) * static_cast<double>(j) / alpha,
                            1.0 / (alpha - 1.0));
    return q[static_cast<std::size_t>(j)] * scale;
}

SurvivalTable survival_probs(double alpha, std::int64_t n) {
    check_alpha(alpha);
    if (n < 0) throw std::invalid_argument("survival_probs: n must be >= 0");
    SurvivalTable t;
    t.alpha = alpha;
    t.q.resize(static_cast<std::size_t>(n) + 1);
    t.q[0] = 1.0;
    for (std::int64_t j = 1; j <= n; ++j) {
        double prev = t.q[static_cast<std::size_t>(j - 1)];
        t.q[static_cast<std::size_t>(j)] = prev - std::pow(prev, alpha) / alpha;
    }
    return t;
}

}  // namespace gwh
