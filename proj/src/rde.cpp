#include "gwh/rde.hpp"

#include <cmath>
#include <stdexcept>

#include "gwh/parallel.hpp"
#include "gwh/rng.hpp"

namespace gwh {

double g_map(double u, std::span<const double> xs) {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("g_map: u outside [0,1)");
    if (xs.empty()) throw std::invalid_argument("g_map: no subtree conductances");
    double s = 0.0;
    for (double x : xs) {
        if (!(x > 0.0)) throw std::invalid_argument("g_map: conductances must be > 0");
        s += x;
    }
    return 1.0 / (u + (1.0 - u) / s);
}

ConductancePool phi_step(const ConductancePool& in, const OffspringDist& offspring,
                         std::uint64_t seed, std::int64_t iteration, int threads,
                         std::int64_t out_size) {
    const std::int64_t p = in.size();
    if (p <= 0) throw std::invalid_argument("phi_step: empty input pool");
    if (in.sorted.size() != in.samples.size())
        throw std::logic_error("phi_step: input pool not finalized");
    if (out_size < 0) out_size = p;

    ConductancePool out;
    out.alpha = in.alpha;
    out.seed = seed;
    out.iterations = iteration;
    out.samples.resize(static_cast<std::size_t>(out_size));

    const double* src = in.sorted.data();
    const auto np = static_cast<std::uint64_t>(p);
    double* dst = out.samples.data();
    parallel_blocks(out_size, threads, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            Rng rng = Rng::stream(seed, stream_label::pool_iter,
                                  static_cast<std::uint64_t>(iteration),
                                  static_cast<std::uint64_t>(i));
            double u = rng.u01();
            std::int64_t n = offspring.sample(rng);
            double s = 0.0;
            for (std::int64_t j = 0; j < n; ++j) s += src[rng.below(np)];
            dst[i] = 1.0 / (u + (1.0 - u) / s);
        }
    });
    out.finalize();
    return out;
}

SolveResult solve_gamma(double alpha, const SolveOptions& opts) {
    if (opts.pool_size <= 0) throw std::invalid_argument("solve_gamma: pool_size");
    if (opts.max_iter <= 0) throw std::invalid_argument("solve_gamma: max_iter");
    const OffspringDist offspring = OffspringDist::theta(alpha);

    SolveResult res;
    res.pool = make_constant_pool(alpha, opts.pool_size, 1.0);
    res.pool.seed = opts.seed;
    for (int it = 1; it <= opts.max_iter; ++it) {
        ConductancePool next =
            phi_step(res.pool, offspring, opts.seed, it, opts.threads);
        double d1 = wasserstein1(res.pool, next);
        res.d1_history.push_back(d1);
        res.pool = std::move(next);
        if (d1 < opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.pool.alpha = alpha;
    res.pool.seed = opts.seed;
    res.pool.iterations = static_cast<std::int64_t>(res.d1_history.size());
    res.pool.converged = res.converged;
    res.pool.final_d1 = res.d1_history.empty() ? 0.0 : res.d1_history.back();
    return res;
}

double contraction_constant(double alpha) {
    const OffspringDist check = OffspringDist::theta(alpha);  // validates alpha
    (void)check;
    double acc = 0.0, comp = 0.0;
    double th = alpha / 2.0;  // theta(2)
    for (std::int64_t k = 2;; ++k) {
        double kk = static_cast<double>(k);
        double term = th * (kk - 1.0 - kk * std::log(kk)) / ((kk - 1.0) * (kk - 1.0));
        double y = term - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        th *= (kk - alpha) / (kk + 1.0);
        if (th <= 0.0) break;  // alpha = 2 terminates after k = 2
        // For j >= 3, |(j-1-j log j)/(j-1)^2| <= (log j + 2)/j, which is
        // decreasing, so the dropped tail is at most (log k + 2)/k times the
        // offspring tail mass sum_{j>k} theta(j) = (k+1) theta(k+1) / alpha.
        double tail_bound =
            (std::log(kk + 1.0) + 2.0) * th / alpha;  // th is theta(k+1) here
        if (tail_bound < 1e-13 && k > 8) break;
    }
    return 1.0 + acc;
}

LaplaceEval laplace(const ConductancePool& pool, double ell) {
    if (!(ell >= 0.0)) throw std::invalid_argument("laplace: ell must be >= 0");
    if (pool.samples.empty()) throw std::logic_error("laplace: empty pool");
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double c : pool.samples) {
        double e = std::exp(-ell * c / 2.0);
        s0 += e;
        s1 += c * e;
        s2 += c * c * e;
    }
    const double n = static_cast<double>(pool.samples.size());
    LaplaceEval ev;
    ev.ell = ell;
    ev.phi = s0 / n;
    ev.dphi = -0.5 * s1 / n;
    ev.ddphi = 0.25 * s2 / n;
    return ev;
}

double cdf_tail(const ConductancePool& pool, double t) {
    if (pool.sorted.size() != pool.samples.size())
        throw std::logic_error("cdf_tail: pool not finalized");
    if (pool.sorted.empty()) throw std::logic_error("cdf_tail: empty pool");
    auto it = std::lower_bound(pool.sorted.begin(), pool.sorted.end(), t);
    return static_cast<double>(pool.sorted.end() - it) /
           static_cast<double>(pool.sorted.size());
}

ShapeFit fit_shape_on_12(const ConductancePool& pool) {
    constexpr int kGrid = 50;
    const double n = static_cast<double>(pool.samples.size());
    double num = 0.0, den = 0.0;
    double emp[kGrid], reg[kGrid];
    for (int i = 0; i < kGrid; ++i) {
        double t = 1.0 + static_cast<double>(i) / (kGrid - 1);
        emp[i] = cdf_tail(pool, t);
        reg[i] = 1.0 / t - 1.0;  // model: tail(t) - 1 = D * (1/t - 1)
        num += reg[i] * (emp[i] - 1.0);
        den += reg[i] * reg[i];
    }
    ShapeFit fit;
    fit.d = num / den;
    for (int i = 0; i < kGrid; ++i) {
        double t = 1.0 + static_cast<double>(i) / (kGrid - 1);
        double model = fit.d / t + 1.0 - fit.d;
        double resid = std::fabs(emp[i] - model);
        double clamped = std::min(std::max(model, 0.0), 1.0);
        double sd = std::sqrt(std::max(clamped * (1.0 - clamped), 1.0 / n) / n);
        fit.sup_err = std::max(fit.sup_err, resid);
        fit.sup_z = std::max(fit.sup_z, resid / sd);
    }
    return fit;
}

}  // namespace gwh
