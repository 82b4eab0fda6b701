#include "gwh/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "gwh/discrete.hpp"
#include "gwh/stats.hpp"

namespace gwh {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_int(std::int64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
}

void require_finalized(const ConductancePool& pool, const char* who) {
    if (pool.samples.empty())
        throw std::invalid_argument(std::string(who) + ": empty pool");
    if (pool.sorted.size() != pool.samples.size())
        throw std::logic_error(std::string(who) + ": pool not finalized");
}

ConductancePool resample_pool(const ConductancePool& pool, Rng& rng) {
    ConductancePool out = pool;
    const auto p = static_cast<std::uint64_t>(pool.samples.size());
    for (auto& x : out.samples) x = pool.samples[rng.below(p)];
    out.finalize();
    return out;
}

}  // namespace

EstimatorReport beta_value(const ConductancePool& pool, std::uint64_t seed,
                           int b_boot) {
    require_finalized(pool, "beta_value");
    const auto p = pool.samples.size();
    std::vector<double> pairs(p);
    Rng rng = Rng::stream(seed, stream_label::pairs, 0);
    for (std::size_t i = 0; i < p; ++i) {
        double s = pool.samples[i];
        double t = pool.samples[rng.below(p)];
        pairs[i] = s * t / (s + t - 1.0);
    }
    auto stat = [](const double* m) { return 0.5 * (m[0] * m[0] / m[1] - 1.0); };
    Boot boot = bootstrap_fn_ci({pool.samples, pairs}, stat, b_boot,
                                Rng::stream(seed, stream_label::bootstrap, 1));
    double ec = mean(pool.samples);
    double epair = mean(pairs);

    EstimatorReport rep;
    rep.name = "beta_value";
    rep.alpha = pool.alpha;
    rep.point = 0.5 * (ec * ec / epair - 1.0);
    rep.ci_low = boot.ci.lo;
    rep.ci_high = boot.ci.hi;
    rep.n_samples = static_cast<std::int64_t>(p);
    rep.seed = seed;
    rep.parameters = {{"mean_conductance", fmt(ec)}, {"pair_mean", fmt(epair)},
                      {"bootstrap", fmt_int(b_boot)}};
    return rep;
}

EstimatorReport beta_formula1(const ConductancePool& pool, std::int64_t n_samples,
                              std::uint64_t seed, int b_boot) {
    require_finalized(pool, "beta_formula1");
    if (n_samples < 2) throw std::invalid_argument("beta_formula1: n_samples");
    const OffspringDist theta = OffspringDist::theta(pool.alpha);
    const auto p = static_cast<std::uint64_t>(pool.sorted.size());
    const double* src = pool.sorted.data();

    std::vector<double> num(static_cast<std::size_t>(n_samples));
    std::vector<double> den(static_cast<std::size_t>(n_samples));
    for (std::int64_t i = 0; i < n_samples; ++i) {
        Rng rng = Rng::stream(seed, stream_label::beta1,
                              static_cast<std::uint64_t>(i));
        std::int64_t n = theta.sample(rng);
        double c0 = src[rng.below(p)];
        double c1 = src[rng.below(p)];
        double s = c1;
        for (std::int64_t j = 2; j <= n; ++j) s += src[rng.below(p)];
        num[static_cast<std::size_t>(i)] = static_cast<double>(n) * c0 * c1 /
                                           (c0 + s - 1.0) * std::log(s / c1);
        den[static_cast<std::size_t>(i)] = c0 * c1 / (c0 + c1 - 1.0);
    }
    Boot boot = bootstrap_ratio_ci(num, den, b_boot,
                                   Rng::stream(seed, stream_label::bootstrap, 2));
    EstimatorReport rep;
    rep.name = "beta_formula1";
    rep.alpha = pool.alpha;
    rep.point = mean(num) / mean(den);
    rep.ci_low = boot.ci.lo;
    rep.ci_high = boot.ci.hi;
    rep.n_samples = n_samples;
    rep.seed = seed;
    rep.parameters = {{"bootstrap", fmt_int(b_boot)}};
    return rep;
}

double KappaGrid::eval(double r) const {
    if (!(r >= 1.0)) throw std::invalid_argument("KappaGrid::eval: r must be >= 1");
    const auto cells = static_cast<double>(x.size() - 1);
    double pos = cells / r;  // position in grid units of x = 1/r
    if (pos >= cells) return val.back();
    auto j = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(j);
    return val[j] * (1.0 - frac) + val[j + 1] * frac;
}

namespace {
constexpr std::size_t kKappaNodes = 257;
}

KappaGrid build_kappa_grid(const ConductancePool& pool, std::int64_t n_composites,
                           std::uint64_t seed) {
    require_finalized(pool, "build_kappa_grid");
    if (n_composites < 2) throw std::invalid_argument("build_kappa_grid: composites");
    const double alpha = pool.alpha;
    const OffspringDist sb = OffspringDist::size_biased_theta(alpha);
    const double m = size_biased_mean(alpha);
    const auto p = static_cast<std::uint64_t>(pool.sorted.size());
    const double* src = pool.sorted.data();

    KappaGrid grid;
    grid.alpha = alpha;
    grid.kmax_tail_prob = sb.tail(grid.kmax);
    grid.kmax_bias_bound = m * mean(pool.samples) * grid.kmax_tail_prob;
    grid.x.resize(kKappaNodes);
    for (std::size_t j = 0; j < kKappaNodes; ++j)
        grid.x[j] = static_cast<double>(j) / static_cast<double>(kKappaNodes - 1);

    std::vector<double> sum(kKappaNodes, 0.0), sumsq(kKappaNodes, 0.0);
    for (std::int64_t i = 0; i < n_composites; ++i) {
        Rng rng = Rng::stream(seed, stream_label::grid,
                              static_cast<std::uint64_t>(i));
        std::int64_t k = std::min<std::int64_t>(sb.sample(rng) + 1, grid.kmax);
        double t1 = src[rng.below(p)];
        double s = t1;
        for (std::int64_t j = 2; j <= k; ++j) s += src[rng.below(p)];
        // node 0 is x = 0, the r -> infinity limit where the term is just t1
        double v = m * t1;
        sum[0] += v;
        sumsq[0] += v * v;
        for (std::size_t j = 1; j < kKappaNodes; ++j) {
            double r = 1.0 / grid.x[j];
            v = m * r * t1 / (r + s - 1.0);
            sum[j] += v;
            sumsq[j] += v * v;
        }
    }
    grid.val.resize(kKappaNodes);
    grid.se.resize(kKappaNodes);
    const double nc = static_cast<double>(n_composites);
    for (std::size_t j = 0; j < kKappaNodes; ++j) {
        grid.val[j] = sum[j] / nc;
        double var = std::max(0.0, sumsq[j] / nc - grid.val[j] * grid.val[j]);
        grid.se[j] = std::sqrt(var / nc);
    }
    return grid;
}

PointEstimate kappa_at(const ConductancePool& pool, double r,
                       std::int64_t n_composites, std::uint64_t seed) {
    require_finalized(pool, "kappa_at");
    if (!(r >= 1.0)) throw std::invalid_argument("kappa_at: r must be >= 1");
    const OffspringDist sb = OffspringDist::size_biased_theta(pool.alpha);
    const double m = size_biased_mean(pool.alpha);
    const auto p = static_cast<std::uint64_t>(pool.sorted.size());
    const double* src = pool.sorted.data();
    constexpr std::int64_t kmax = 10000;

    MeanVar mv;
    for (std::int64_t i = 0; i < n_composites; ++i) {
        Rng rng = Rng::stream(seed, stream_label::kappa,
                              static_cast<std::uint64_t>(i));
        std::int64_t k = std::min<std::int64_t>(sb.sample(rng) + 1, kmax);
        double t1 = src[rng.below(p)];
        double s = t1;
        for (std::int64_t j = 2; j <= k; ++j) s += src[rng.below(p)];
        mv.add(m * r * t1 / (r + s - 1.0));
    }
    return PointEstimate{mv.mean, mv.se()};
}

EstimatorReport beta_formula2(const ConductancePool& pool, std::int64_t n_samples,
                              std::uint64_t seed, const KappaGrid* grid,
                              bool kappa_one, int b_boot) {
    require_finalized(pool, "beta_formula2");
    if (n_samples < 2) throw std::invalid_argument("beta_formula2: n_samples");
    KappaGrid local;
    if (grid == nullptr && !kappa_one) {
        local = build_kappa_grid(pool, 20000, derive_seed(seed, stream_label::grid));
        grid = &local;
    }
    const OffspringDist theta = OffspringDist::theta(pool.alpha);
    const auto p = static_cast<std::uint64_t>(pool.sorted.size());
    const double* src = pool.sorted.data();

    std::vector<double> num(static_cast<std::size_t>(n_samples));
    std::vector<double> den(static_cast<std::size_t>(n_samples));
    for (std::int64_t i = 0; i < n_samples; ++i) {
        Rng rng = Rng::stream(seed, stream_label::beta2,
                              static_cast<std::uint64_t>(i));
        double u = rng.u01();
        std::int64_t n = theta.sample(rng);
        double c1 = src[rng.below(p)];
        double s = c1;
        for (std::int64_t j = 2; j <= n; ++j) s += src[rng.below(p)];
        double g = 1.0 / (u + (1.0 - u) / s);
        double kap = kappa_one ? 1.0 : grid->eval(g);
        num[static_cast<std::size_t>(i)] =
            static_cast<double>(n) * (c1 / s) * std::log(c1 / s) * kap;
        den[static_cast<std::size_t>(i)] = std::log1p(-u) * kap;
    }
    Boot boot = bootstrap_ratio_ci(num, den, b_boot,
                                   Rng::stream(seed, stream_label::bootstrap, 3));
    EstimatorReport rep;
    rep.name = kappa_one ? "beta_formula2_kappa1" : "beta_formula2";
    rep.alpha = pool.alpha;
    rep.point = mean(num) / mean(den);
    rep.ci_low = boot.ci.lo;
    rep.ci_high = boot.ci.hi;
    rep.n_samples = n_samples;
    rep.seed = seed;
    rep.parameters = {{"bootstrap", fmt_int(b_boot)}};
    if (!kappa_one && grid != nullptr) {
        rep.parameters.emplace_back("kappa_kmax_tail_prob", fmt(grid->kmax_tail_prob));
        rep.parameters.emplace_back("kappa_kmax_bias_bound",
                                    fmt(grid->kmax_bias_bound));
    }
    return rep;
}

IdentityCheck kappa_consistency(const ConductancePool& pool, double r,
                                std::int64_t n_composites, int b_boot,
                                std::uint64_t seed) {
    require_finalized(pool, "kappa_consistency");
    if (!(r >= 1.0)) throw std::invalid_argument("kappa_consistency: r >= 1");
    if (b_boot < 8) throw std::invalid_argument("kappa_consistency: b_boot too small");
    const OffspringDist sb = OffspringDist::size_biased_theta(pool.alpha);
    const double m = size_biased_mean(pool.alpha);
    constexpr std::int64_t kmax = 10000;

    auto one_diff = [&](const ConductancePool& pl, std::uint64_t sd) {
        KappaGrid grid = build_kappa_grid(pl, n_composites, derive_seed(sd, 1));
        double lhs = kappa_at(pl, r, n_composites, derive_seed(sd, 2)).value;
        const auto p = static_cast<std::uint64_t>(pl.sorted.size());
        const double* src = pl.sorted.data();
        MeanVar mv;
        for (std::int64_t i = 0; i < n_composites; ++i) {
            Rng rng = Rng::stream(derive_seed(sd, 3), stream_label::kappa_inner,
                                  static_cast<std::uint64_t>(i));
            std::int64_t k = std::min<std::int64_t>(sb.sample(rng) + 1, kmax);
            double x = rng.u01();
            double s2 = 0.0;
            for (std::int64_t j = 2; j <= k; ++j) s2 += src[rng.below(p)];
            double arg = 1.0 / (x + (1.0 - x) / (r + s2));
            mv.add(m * r / (r + s2) * grid.eval(arg));
        }
        return std::make_pair(lhs, mv.mean);
    };

    auto [lhs0, rhs0] = one_diff(pool, derive_seed(seed, 0xa0));
    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(b_boot));
    for (int b = 1; b <= b_boot; ++b) {
        Rng rng = Rng::stream(seed, stream_label::bootstrap,
                              static_cast<std::uint64_t>(b));
        ConductancePool pb = resample_pool(pool, rng);
        auto [l, rr] = one_diff(pb, derive_seed(seed, 0xb0, static_cast<std::uint64_t>(b)));
        diffs.push_back(l - rr);
    }
    IdentityCheck chk;
    chk.name = "kappa_consistency";
    chk.lhs = lhs0;
    chk.rhs = rhs0;
    chk.diff = lhs0 - rhs0;
    chk.se = stddev(diffs);
    chk.z = chk.diff / chk.se;
    chk.notes.push_back("r=" + fmt(r));
    chk.notes.push_back("pool+composite bootstrap, B=" + fmt_int(b_boot));
    return chk;
}

namespace {

// Simpson rule weights on [0, S] with an even number of panels.
std::vector<double> simpson_weights(double h, std::size_t nodes) {
    std::vector<double> w(nodes, 0.0);
    for (std::size_t k = 0; k + 2 < nodes; k += 2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    return w;
}

}  // namespace

IdentityCheck c1_identity(const ConductancePool& pool, std::uint64_t seed) {
    require_finalized(pool, "c1_identity");
    // 2 int phi'(s)^2 e^{s/2} ds truncated at S: the integrand is below
    // (E[C^2]/2) e^{-s/2}, so the dropped tail is under E[C^2] e^{-S/2},
    // far below 1e-6 of the value at S = 35.
    constexpr double kS = 35.0;
    constexpr double kH = 1.0 / 16.0;
    const auto nodes = static_cast<std::size_t>(kS / kH) + 1;
    const std::vector<double> w = simpson_weights(kH, nodes);

    const auto p = pool.samples.size();
    constexpr std::size_t kBatches = 50;
    const std::size_t batch = (p + kBatches - 1) / kBatches;

    // phi'(s_k) accumulated per batch with incremental powers:
    // exp(-s_k c/2) = base^k with base = exp(-h c / 2).
    std::vector<double> dphi_batch(kBatches * nodes, 0.0);
    std::vector<std::size_t> batch_n(kBatches, 0);
    std::vector<double> rhs_batch(kBatches, 0.0);
    Rng pair_rng = Rng::stream(seed, stream_label::pairs, 1);
    double rhs_full = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        const double c = pool.samples[i];
        const std::size_t b = i / batch;
        ++batch_n[b];
        double* row = dphi_batch.data() + b * nodes;
        const double base = std::exp(-kH * c / 2.0);
        double pw = 1.0;
        for (std::size_t k = 0; k < nodes; ++k) {
            row[k] += -0.5 * c * pw;
            pw *= base;
        }
        double cj = pool.samples[pair_rng.below(p)];
        double g = c * cj / (c + cj - 1.0);
        rhs_batch[b] += g;
        rhs_full += g;
    }
    rhs_full /= static_cast<double>(p);

    auto lhs_of = [&](const double* dphi_sums, double n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < nodes; ++k) {
            double s = static_cast<double>(k) * kH;
            double d = dphi_sums[k] / n;
            acc += w[k] * d * d * std::exp(s / 2.0);
        }
        return 2.0 * acc;
    };

    std::vector<double> full(nodes, 0.0);
    for (std::size_t b = 0; b < kBatches; ++b)
        for (std::size_t k = 0; k < nodes; ++k)
            full[k] += dphi_batch[b * nodes + k];
    const double lhs_full = lhs_of(full.data(), static_cast<double>(p));

    // Batch means: each batch yields its own (lhs, rhs) from disjoint
    // samples; the spread of the differences gives the error of the full
    // difference including the cross-covariance.
    std::vector<double> diffs;
    diffs.reserve(kBatches);
    for (std::size_t b = 0; b < kBatches; ++b) {
        if (batch_n[b] < 16) continue;
        double nb = static_cast<double>(batch_n[b]);
        diffs.push_back(lhs_of(dphi_batch.data() + b * nodes, nb) -
                        rhs_batch[b] / nb);
    }
    const double nb = static_cast<double>(diffs.size());

    IdentityCheck chk;
    chk.name = "c1_identity";
    chk.lhs = lhs_full;
    chk.rhs = rhs_full;
    chk.diff = lhs_full - rhs_full;
    chk.se = stddev(diffs) / std::sqrt(nb);
    chk.z = chk.diff / chk.se;
    chk.notes.push_back("quadrature: Simpson, S=" + fmt(kS) + ", h=" + fmt(kH));
    chk.notes.push_back("error from " + fmt_int(static_cast<std::int64_t>(nb)) +
                        " batch means");
    if (chk.rhs != 0.0)
        chk.notes.push_back("rel_diff=" + fmt(chk.diff / chk.rhs));
    return chk;
}

double phi_inf(const ConductancePool& pool, double c, std::uint64_t seed) {
    require_finalized(pool, "phi_inf");
    if (!(c >= 1.0)) throw std::invalid_argument("phi_inf: c must be >= 1");
    const auto p = pool.samples.size();
    Rng rng = Rng::stream(seed, stream_label::pairs, 2);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        double s = pool.samples[i];
        double t = pool.samples[rng.below(p)];
        num += c * s / (c + s - 1.0);
        den += s * t / (s + t - 1.0);
    }
    return num / den;
}

OdeResidual ode_residual(const ConductancePool& pool, double ell) {
    require_finalized(pool, "ode_residual");
    if (!(ell > 0.0)) throw std::invalid_argument("ode_residual: ell must be > 0");
    const double alpha = pool.alpha;
    LaplaceEval ev = laplace(pool, ell);
    const double gp = (1.0 - alpha * std::pow(1.0 - ev.phi, alpha - 1.0)) /
                      (alpha - 1.0);
    const double g = (std::pow(1.0 - ev.phi, alpha) + ev.phi - 1.0) / (alpha - 1.0);

    OdeResidual res;
    res.ell = ell;
    res.residual = 2.0 * ell * ev.ddphi + ell * ev.dphi + g;

    // Influence of one sample on the plug-in residual; its spread gives the
    // delta-method error.
    const double center =
        2.0 * ell * ev.ddphi + ell * ev.dphi + gp * ev.phi;
    double var = 0.0;
    for (double c : pool.samples) {
        double e = std::exp(-ell * c / 2.0);
        double infl = (0.5 * ell * c * c - 0.5 * ell * c + gp) * e - center;
        var += infl * infl;
    }
    const double n = static_cast<double>(pool.samples.size());
    res.se = std::sqrt(var / (n - 1.0)) / std::sqrt(n);
    return res;
}

IdentityCheck moment_identity(const ConductancePool& pool, std::uint64_t seed,
                              int b_boot) {
    require_finalized(pool, "moment_identity");
    const double m = size_biased_mean(pool.alpha);
    const auto p = pool.samples.size();
    std::vector<double> sq(p);
    for (std::size_t i = 0; i < p; ++i) sq[i] = pool.samples[i] * pool.samples[i];
    auto stat = [m](const double* v) { return v[0] - m * v[1]; };
    Boot boot = bootstrap_fn_ci({sq, pool.samples}, stat, b_boot,
                                Rng::stream(seed, stream_label::moment, 0));
    IdentityCheck chk;
    chk.name = "second_moment_identity";
    chk.lhs = mean(sq);
    chk.rhs = m * mean(pool.samples);
    chk.diff = chk.lhs - chk.rhs;
    chk.se = boot.sd;
    chk.z = chk.diff / chk.se;
    chk.notes.push_back("rel_diff=" + fmt(chk.diff / chk.rhs));
    return chk;
}

IdentityCheck star_identity(const ConductancePool& pool, std::int64_t n_composites,
                            std::uint64_t seed, int b_boot) {
    require_finalized(pool, "star_identity");
    const OffspringDist theta = OffspringDist::theta(pool.alpha);
    const auto p = static_cast<std::uint64_t>(pool.sorted.size());
    const double* src = pool.sorted.data();
    MeanVar sums;
    for (std::int64_t i = 0; i < n_composites; ++i) {
        Rng rng = Rng::stream(seed, stream_label::star,
                              static_cast<std::uint64_t>(i));
        std::int64_t n = theta.sample(rng);
        double s = 0.0;
        for (std::int64_t j = 0; j < n; ++j) s += src[rng.below(p)];
        sums.add(s);
    }
    std::vector<double> sq(pool.samples.size());
    for (std::size_t i = 0; i < sq.size(); ++i)
        sq[i] = pool.samples[i] * pool.samples[i];
    Boot boot = bootstrap_mean_ci(sq, b_boot,
                                  Rng::stream(seed, stream_label::star, 1));
    IdentityCheck chk;
    chk.name = "star_identity";
    chk.lhs = sums.mean;
    chk.rhs = mean(sq);
    chk.diff = chk.lhs - chk.rhs;
    chk.se = std::sqrt(sums.se() * sums.se() + boot.sd * boot.sd);
    chk.z = chk.diff / chk.se;
    chk.notes.push_back("composite mean of offspring sums vs pool second moment");
    return chk;
}

double c0_constant() {
    // Direct Kahan sum of 2 (2 + k/(k-1)) log k / (k (k-1)) to k = 1e6, then
    // Euler-Maclaurin tails of sum_{k>=a} log(k) k^{-j} through the expansion
    // 2 log x (2/(x(x-1)) + 1/(x-1)^2) = 2 log x sum_{j>=2} (j+1) x^{-j}.
    constexpr std::int64_t kDirect = 1000000;
    double acc = 0.0, comp = 0.0;
    for (std::int64_t k = 2; k <= kDirect; ++k) {
        double kk = static_cast<double>(k);
        double term = 2.0 * (2.0 + kk / (kk - 1.0)) * std::log(kk) /
                      (kk * (kk - 1.0));
        double y = term - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    const double a = static_cast<double>(kDirect + 1);
    const double la = std::log(a);
    double tail = 0.0;
    for (int j = 2; j <= 12; ++j) {
        double jm = static_cast<double>(j) - 1.0;
        double integral = std::pow(a, -jm) * (la / jm + 1.0 / (jm * jm));
        double f = la * std::pow(a, -static_cast<double>(j));
        double fp = std::pow(a, -static_cast<double>(j) - 1.0) *
                    (1.0 - static_cast<double>(j) * la);
        double s_j = integral + f / 2.0 - fp / 12.0;
        tail += 2.0 * (static_cast<double>(j) + 1.0) * s_j;
    }
    return acc + tail;
}

double dimension_cap() {
    double c0 = c0_constant();
    return (2.0 * c0 * c0 - 1.0) / 2.0;
}

SpeedReport speed(const ConductancePool& pool, std::uint64_t seed, int b_boot) {
    require_finalized(pool, "speed");
    const auto p = pool.samples.size();
    std::vector<double> num(p), den(p);
    Rng rng = Rng::stream(seed, stream_label::speed, 0);
    for (std::size_t i = 0; i < p; ++i) {
        double c0 = pool.samples[i];
        double c1 = pool.samples[rng.below(p)];
        num[i] = c0 * c1 / (c0 + c1 - 1.0);
        // E[2 C0/(C0+C1-1)] in its exchangeable form (C0+C1)/(C0+C1-1)
        den[i] = (c0 + c1) / (c0 + c1 - 1.0);
    }
    Boot ratio = bootstrap_ratio_ci(num, den, b_boot,
                                    Rng::stream(seed, stream_label::bootstrap, 4));
    Boot dend = bootstrap_mean_ci(den, b_boot,
                                  Rng::stream(seed, stream_label::bootstrap, 5));
    SpeedReport rep;
    rep.speed.name = "speed";
    rep.speed.alpha = pool.alpha;
    rep.speed.point = mean(num) / mean(den);
    rep.speed.ci_low = ratio.ci.lo;
    rep.speed.ci_high = ratio.ci.hi;
    rep.speed.n_samples = static_cast<std::int64_t>(p);
    rep.speed.seed = seed;
    rep.speed.parameters = {{"bootstrap", fmt_int(b_boot)}};
    rep.denominator = mean(den);
    rep.den_ci_low = dend.ci.lo;
    rep.den_ci_high = dend.ci.hi;
    return rep;
}

std::vector<ScanRow> conductance_mean_scan(const std::vector<double>& alphas,
                                           const SolveOptions& base) {
    std::vector<ScanRow> rows;
    for (double a : alphas) {
        SolveResult res = solve_gamma(a, base);
        Boot boot = bootstrap_mean_ci(res.pool.samples, kBootstrapDefault,
                                      Rng::stream(base.seed, stream_label::scan, 0));
        ScanRow row;
        row.key = a;
        row.value = res.pool.mean();
        row.ci_low = boot.ci.lo;
        row.ci_high = boot.ci.hi;
        rows.push_back(row);
    }
    return rows;
}

std::vector<SpeedReport> speed_scan(const std::vector<double>& alphas,
                                    const SolveOptions& base) {
    std::vector<SpeedReport> rows;
    for (double a : alphas) {
        SolveResult res = solve_gamma(a, base);
        rows.push_back(speed(res.pool, base.seed));
    }
    return rows;
}

std::vector<ScanRow> discrete_dimension_scan(double alpha,
                                             const std::vector<std::int32_t>& n_list,
                                             std::int64_t replicas,
                                             std::uint64_t seed) {
    if (replicas < 2) throw std::invalid_argument("discrete_dimension_scan: replicas");
    const OffspringDist rho = OffspringDist::rho_canonical(alpha);
    SampleLimits limits;
    std::vector<ScanRow> rows;
    for (std::int32_t n : n_list) {
        MeanVar mv;
        for (std::int64_t rep = 0; rep < replicas; ++rep) {
            Rng rng = Rng::stream(seed, stream_label::discrete,
                                  static_cast<std::uint64_t>(n),
                                  static_cast<std::uint64_t>(rep));
            DiscreteTree t = sample_conditioned(rho, n, limits, rng);
            ReducedTree rt = reduce(t, n);
            mv.add(mean_log_mu(rt));
        }
        const double ln = std::log(static_cast<double>(n));
        ScanRow row;
        row.key = n;
        row.value = mv.mean / ln;
        row.ci_low = (mv.mean - 1.96 * mv.se()) / ln;
        row.ci_high = (mv.mean + 1.96 * mv.se()) / ln;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gwh
