#include "gwh/ctgw.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "gwh/stats.hpp"

namespace gwh {

CtgwTree sample_ctgw(double alpha, double r, std::int64_t cap, Rng& rng) {
    if (!(r > 0.0)) throw std::invalid_argument("sample_ctgw: r must be > 0");
    if (cap < 1) throw std::invalid_argument("sample_ctgw: cap must be >= 1");
    const OffspringDist offspring = OffspringDist::theta(alpha);

    CtgwTree tree;
    tree.alpha = alpha;
    tree.r = r;
    tree.nodes.push_back(CtgwNode{-1, -1, 0, 0.0, rng.exp1()});
    // BFS order doubles as processing order: children are appended after
    // their parent, so a single forward scan visits everything.
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const double death = tree.nodes[i].death;
        if (death >= r) continue;  // alive at the cut, no branching below r
        std::int64_t k = offspring.sample(rng);
        if (static_cast<std::int64_t>(tree.nodes.size()) + k > cap) {
            tree.overflow = true;
            break;
        }
        tree.nodes[i].first_child = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes[i].n_children = static_cast<std::int32_t>(k);
        for (std::int64_t c = 0; c < k; ++c) {
            CtgwNode child;
            child.parent = static_cast<std::int32_t>(i);
            child.birth = death;
            child.death = death + rng.exp1();
            tree.nodes.push_back(child);
        }
    }
    return tree;
}

std::int64_t level_count(const CtgwTree& tree, double s) {
    if (!(s >= 0.0) || s > tree.r)
        throw std::invalid_argument("level_count: s outside [0, r]");
    if (s == 0.0) return 1;
    std::int64_t n = 0;
    for (const auto& node : tree.nodes)
        if (node.birth < s && s <= node.death) ++n;
    return n;
}

double martingale_stat(const CtgwTree& tree, double alpha) {
    return std::exp(-tree.r / (alpha - 1.0)) *
           static_cast<double>(level_count(tree, tree.r));
}

void map_to_delta(CtgwTree& tree) {
    for (auto& node : tree.nodes) {
        node.birth = -std::expm1(-node.birth);
        node.death = -std::expm1(-node.death);
    }
    tree.r = -std::expm1(-tree.r);
}

void dump_tree(const CtgwTree& tree, std::ostream& os) {
    os << "id,parent,birth,death\n";
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& n = tree.nodes[i];
        os << i << ',' << n.parent << ',' << n.birth << ',' << n.death << '\n';
    }
}

std::int64_t level_population(const OffspringDist& offspring, double r, Rng& rng,
                              std::int64_t cap) {
    if (!(r > 0.0)) throw std::invalid_argument("level_population: r must be > 0");
    std::int64_t pop = 1;
    double h = 0.0;
    for (;;) {
        // Next death among pop independent Exp(1) clocks.
        h += rng.exp1() / static_cast<double>(pop);
        if (h > r) return pop;
        pop += offspring.sample(rng) - 1;
        if (pop > cap)
            throw std::runtime_error("level_population: population exceeded cap");
    }
}

std::vector<double> level_counts_doubling(double alpha, double r0, int doublings,
                                          std::int64_t pool_size,
                                          std::int64_t out_count,
                                          std::uint64_t seed) {
    if (pool_size <= 0 || out_count <= 0)
        throw std::invalid_argument("level_counts_doubling: sizes must be > 0");
    const OffspringDist offspring = OffspringDist::theta(alpha);

    std::vector<double> pool(static_cast<std::size_t>(pool_size));
    for (std::int64_t i = 0; i < pool_size; ++i) {
        Rng rng = Rng::stream(seed, stream_label::ctgw_pool, 0,
                              static_cast<std::uint64_t>(i));
        pool[static_cast<std::size_t>(i)] =
            static_cast<double>(level_population(offspring, r0, rng));
    }
    for (int d = 1; d <= doublings; ++d) {
        const std::int64_t n_out = (d == doublings) ? out_count : pool_size;
        std::vector<double> next(static_cast<std::size_t>(n_out));
        const auto psize = static_cast<std::uint64_t>(pool.size());
        for (std::int64_t i = 0; i < n_out; ++i) {
            Rng rng = Rng::stream(seed, stream_label::ctgw_pool,
                                  static_cast<std::uint64_t>(d),
                                  static_cast<std::uint64_t>(i));
            auto copies = static_cast<std::int64_t>(pool[rng.below(psize)]);
            double s = 0.0;
            for (std::int64_t c = 0; c < copies; ++c) s += pool[rng.below(psize)];
            next[static_cast<std::size_t>(i)] = s;
        }
        pool = std::move(next);
    }
    return pool;
}

double level_laplace_closed(double alpha, double r, double u) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("level_laplace_closed: alpha must be in (1,2)");
    if (!(r > 0.0) || !(u > 0.0))
        throw std::invalid_argument("level_laplace_closed: r and u must be > 0");
    double inner = 1.0 - std::exp(-r) * (1.0 - std::pow(-std::expm1(-u), 1.0 - alpha));
    return 1.0 - std::pow(inner, 1.0 / (1.0 - alpha));
}

double w_laplace_closed(double alpha, double u) {
    if (!(alpha > 1.0 && alpha <= 2.0))
        throw std::invalid_argument("w_laplace_closed: alpha must be in (1,2]");
    if (!(u >= 0.0)) throw std::invalid_argument("w_laplace_closed: u must be >= 0");
    double am1 = alpha - 1.0;
    return 1.0 - u / std::pow(1.0 + std::pow(u, am1), 1.0 / am1);
}

LaplaceCheck level_laplace_check(double alpha, double r, double u,
                                 std::int64_t replicas, std::uint64_t seed) {
    if (replicas < 2)
        throw std::invalid_argument("level_laplace_check: need >= 2 replicas");
    const double target = level_laplace_closed(alpha, r, u);  // validates alpha
    const OffspringDist offspring = OffspringDist::theta(alpha);
    MeanVar mv;
    for (std::int64_t i = 0; i < replicas; ++i) {
        Rng rng = Rng::stream(seed, stream_label::ctgw, 1,
                              static_cast<std::uint64_t>(i));
        auto n = level_population(offspring, r, rng);
        mv.add(std::exp(-u * static_cast<double>(n)));
    }
    LaplaceCheck chk;
    chk.empirical = mv.mean;
    chk.closed_form = target;
    chk.se = mv.se();
    chk.z = (chk.empirical - target) / chk.se;
    return chk;
}

}  // namespace gwh
