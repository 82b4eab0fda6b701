#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gwh/offspring.hpp"
#include "gwh/rng.hpp"

namespace gwh {

// Continuous-time branching tree: every individual lives an independent
// Exp(1) lifetime and branches into theta_alpha offspring at death.  Grown
// breadth-first up to height r; individuals alive at r keep their full
// sampled death time, so lifetimes are uncensored Exp(1) draws.
struct CtgwNode {
    std::int32_t parent = -1;
    std::int32_t first_child = -1;
    std::int32_t n_children = 0;
    double birth = 0.0;
    double death = 0.0;
};

struct CtgwTree {
    double alpha = 0.0;
    double r = 0.0;
    bool overflow = false;  // node cap hit; tree is incomplete below r
    std::vector<CtgwNode> nodes;  // BFS order, root at index 0
};

CtgwTree sample_ctgw(double alpha, double r, std::int64_t cap, Rng& rng);

// Individuals alive at height s: birth < s <= death, with level_count(0) = 1
// for the root by convention.  Throws if s < 0 or s > tree.r.
std::int64_t level_count(const CtgwTree& tree, double s);

// exp(-r/(alpha-1)) * level_count(r); a nonnegative martingale in r with
// mean 1, converging to the limit variable W.
double martingale_stat(const CtgwTree& tree, double alpha);

// Map heights z -> 1 - exp(-z), carrying the tree onto the unit-depth
// continuum scale.  In place; also rescales tree.r.
void map_to_delta(CtgwTree& tree);

// CSV dump: id,parent,birth,death per node.
void dump_tree(const CtgwTree& tree, std::ostream& os);

// Population alive at height r via the jump chain (heights of successive
// deaths), without storing the tree.  Throws if the population passes cap.
std::int64_t level_population(const OffspringDist& offspring, double r, Rng& rng,
                              std::int64_t cap = 1000000000);

// Level sizes at r0 * 2^doublings, composed stage by stage: the population at
// height 2r is a sum of population-at-r many independent copies of the
// population at r.  Stages resample from empirical pools of size pool_size,
// which biases smooth functionals by O(1/pool_size).
std::vector<double> level_counts_doubling(double alpha, double r0, int doublings,
                                          std::int64_t pool_size,
                                          std::int64_t out_count, std::uint64_t seed);

// Closed forms for the transforms of level counts and of the martingale
// limit W.
double level_laplace_closed(double alpha, double r, double u);  // alpha in (1,2)
double w_laplace_closed(double alpha, double u);                // alpha in (1,2]

struct LaplaceCheck {
    double empirical = 0.0;
    double closed_form = 0.0;
    double se = 0.0;
    double z = 0.0;
};

// Monte Carlo check of E[exp(-u * level_count(r))] against the closed form.
// Defined for alpha in (1,2); the boundary alpha = 2 has no finite-variance
// stable limit of this shape and is rejected.
LaplaceCheck level_laplace_check(double alpha, double r, double u,
                                 std::int64_t replicas, std::uint64_t seed);

}  // namespace gwh
