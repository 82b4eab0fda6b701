#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gwh/offspring.hpp"
#include "gwh/pool.hpp"

namespace gwh {

// One application of the conductance recursion: with U = u and subtree
// conductances xs, the root of the reduced tree one level higher has
// conductance (u + (1-u) / (x_1 + ... + x_n))^{-1}.
double g_map(double u, std::span<const double> xs);

// Resample `out_size` conductances (default: same size) by pushing the pool
// through the recursion once with fresh U, offspring count and subtree draws.
// Draw order per output index i, on stream (seed, pool_iter, iteration, i):
// first U, then N, then N pool indices.  This order is part of the file
// format in spirit: changing it changes every seeded result.
ConductancePool phi_step(const ConductancePool& in, const OffspringDist& offspring,
                         std::uint64_t seed, std::int64_t iteration,
                         int threads = 0, std::int64_t out_size = -1);

struct SolveOptions {
    std::int64_t pool_size = 200000;
    int max_iter = 300;
    double tol = 1e-3;  // Wasserstein-1 between successive iterates
    std::uint64_t seed = 1;
    int threads = 0;  // <= 0: GWHARM_THREADS or hardware concurrency
};

struct SolveResult {
    ConductancePool pool;
    bool converged = false;
    std::vector<double> d1_history;  // d1 after each iteration
};

// Population-dynamics fixed point for the conductance law: start from the
// pool identically 1 and iterate phi_step until the Wasserstein-1 step size
// drops below tol.  Non-convergence is reported, never silently ignored.
SolveResult solve_gamma(double alpha, const SolveOptions& opts);

// Contraction coefficient of the recursion in the Wasserstein metric:
// 1 + sum_k theta_alpha(k) (k - 1 - k log k) / (k-1)^2, summed until the
// remainder is provably below 1e-12.  Lies in (0,1) for alpha in (1,2].
double contraction_constant(double alpha);

// Empirical Laplace functional phi(ell) = E[exp(-ell C / 2)] with its exact
// first two derivatives (no finite differencing).
struct LaplaceEval {
    double ell = 0.0;
    double phi = 0.0;
    double dphi = 0.0;
    double ddphi = 0.0;
};
LaplaceEval laplace(const ConductancePool& pool, double ell);

// Empirical P(C >= t).
double cdf_tail(const ConductancePool& pool, double t);

// Least-squares fit of the survival function on [1,2] against the one
// parameter family t -> D/t + 1 - D, on a 50 point grid.  sup_z is the
// largest |residual| measured in binomial standard deviations.
struct ShapeFit {
    double d = 0.0;
    double sup_err = 0.0;
    double sup_z = 0.0;
};
ShapeFit fit_shape_on_12(const ConductancePool& pool);

}  // namespace gwh
