#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gwh/offspring.hpp"
#include "gwh/rng.hpp"

namespace gwh {

// Rooted tree stored level by level in BFS order.  Children of a node are
// contiguous; level_start has one entry per generation plus an end sentinel,
// so generation g occupies [level_start[g], level_start[g+1]).
struct DiscreteTree {
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> first_child;
    std::vector<std::int32_t> n_children;
    std::vector<std::int32_t> level_start;

    std::int64_t size() const { return static_cast<std::int64_t>(parent.size()); }
    std::int32_t height() const {
        return static_cast<std::int32_t>(level_start.size()) - 2;
    }
};

// Deterministic construction from children counts in BFS order; counts must
// describe a complete tree (1 + sum = length).
DiscreteTree tree_from_bfs_counts(const std::vector<std::int64_t>& counts);

struct SampleLimits {
    std::int64_t node_cap = 1000000;   // per attempt
    std::int64_t retry_cap = 10000000;
};

struct SampleCounters {
    std::int64_t attempts = 0;
};

// Galton-Watson tree with the given offspring law, conditioned to reach
// generation n, grown only up to generation n.  Plain rejection with early
// abandon: an attempt dies the moment a generation comes up empty.  The
// acceptance probability is exactly the survival probability q_n.  Caps are
// hard errors, not silent truncations.
DiscreteTree sample_conditioned(const OffspringDist& offspring, std::int32_t n,
                                const SampleLimits& limits, Rng& rng,
                                SampleCounters* counters = nullptr);

// Reduced tree: vertices of generations 0..n with a descendant at generation
// n, with electrical annotations.  resistance[v] is the effective resistance
// from v to generation n through unit resistor edges below v (0 for the
// leaves); split_w[v] is the harmonic exit probability of the edge into v
// from its parent, and log_split its logarithm.  The root carries split 1.
struct ReducedTree {
    std::int32_t n = 0;
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> first_child;
    std::vector<std::int32_t> n_children;
    std::vector<std::int32_t> level_start;
    std::vector<double> resistance;
    std::vector<double> split_w;
    std::vector<double> log_split;

    std::int64_t size() const { return static_cast<std::int64_t>(parent.size()); }
};

ReducedTree reduce(const DiscreteTree& tree, std::int32_t n);

// Conductance between the parent edge of the root and generation n: one unit
// resistor above the root in series with the reduced subtree, so the value is
// 1 / (1 + resistance[root]).  Unary chain: 1/(n+1); full binary tree:
// 1/(2 - 2^{1-n} ... ) see tests for the closed forms.
double conductance_n(const ReducedTree& rt);

std::int64_t level_size(const ReducedTree& rt, std::int32_t m);

// One leaf of the reduced tree drawn exactly from the harmonic measure by
// walking down the split weights.  cum_log[g] is the log-measure of the
// sub-ball after g steps (cum_log[0] = 0, cum_log[n] = log_mu).
struct HarmonicSample {
    std::vector<std::int32_t> ray;  // node ids, root first, length n+1
    std::vector<double> cum_log;
    double log_mu = 0.0;
};

HarmonicSample harmonic_exact(const ReducedTree& rt, Rng& rng);

// Measure of the ball of radius j around the sampled ray tip: the sub-ball
// rooted at generation n - j, i.e. exp(cum_log[n-j]).  mu_ball(s, n) = 1.
double mu_ball(const HarmonicSample& s, std::int32_t j);

// Simple random walk from the root until it first reaches generation n;
// returns the id of the node hit.  At the root every child is equally
// likely; elsewhere the parent is one more uniform neighbour.
std::int64_t srw_hit(const ReducedTree& rt, Rng& rng,
                     std::int64_t step_cap = 1000000000);

// Exact harmonic measure of every generation-n leaf, BFS order.
std::vector<double> leaf_mu(const ReducedTree& rt);

// Mean of -log mu over the harmonic measure, computed exactly by the
// recursion S(v) = sum_c w_c (S(c) - log w_c).  This is the entropy of the
// leaf law mu_n.
double mean_log_mu(const ReducedTree& rt);

void dump_reduced(const ReducedTree& rt, std::ostream& os);

}  // namespace gwh
