#include "gwh/discrete.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gwh {

DiscreteTree tree_from_bfs_counts(const std::vector<std::int64_t>& counts) {
    if (counts.empty()) throw std::invalid_argument("tree_from_bfs_counts: empty");
    std::int64_t total = 1;
    for (auto c : counts) {
        if (c < 0) throw std::invalid_argument("tree_from_bfs_counts: negative count");
        total += c;
    }
    if (total != static_cast<std::int64_t>(counts.size()))
        throw std::invalid_argument("tree_from_bfs_counts: counts do not close");

    DiscreteTree t;
    const auto n = counts.size();
    t.parent.assign(n, -1);
    t.first_child.assign(n, -1);
    t.n_children.assign(n, 0);
    std::int64_t next = 1;
    t.level_start = {0, 1};
    std::int64_t level_end = 1;
    for (std::size_t v = 0; v < n; ++v) {
        t.n_children[v] = static_cast<std::int32_t>(counts[v]);
        if (counts[v] > 0) t.first_child[v] = static_cast<std::int32_t>(next);
        for (std::int64_t c = 0; c < counts[v]; ++c)
            t.parent[static_cast<std::size_t>(next + c)] = static_cast<std::int32_t>(v);
        next += counts[v];
        if (static_cast<std::int64_t>(v + 1) == level_end && next > level_end) {
            t.level_start.push_back(static_cast<std::int32_t>(next));
            level_end = next;
        }
    }
    return t;
}

DiscreteTree sample_conditioned(const OffspringDist& offspring, std::int32_t n,
                                const SampleLimits& limits, Rng& rng,
                                SampleCounters* counters) {
    if (n < 0) throw std::invalid_argument("sample_conditioned: n must be >= 0");
    for (std::int64_t attempt = 1; attempt <= limits.retry_cap; ++attempt) {
        if (counters) ++counters->attempts;
        DiscreteTree t;
        t.parent = {-1};
        t.first_child = {-1};
        t.n_children = {0};
        t.level_start = {0, 1};
        bool alive = true, capped = false;
        for (std::int32_t g = 0; g < n && alive; ++g) {
            const auto lo = static_cast<std::int64_t>(t.level_start[g]);
            const auto hi = static_cast<std::int64_t>(t.level_start[g + 1]);
            for (std::int64_t v = lo; v < hi; ++v) {
                std::int64_t k = offspring.sample(rng);
                if (t.size() + k > limits.node_cap) {
                    capped = true;
                    break;
                }
                t.n_children[static_cast<std::size_t>(v)] =
                    static_cast<std::int32_t>(k);
                if (k > 0)
                    t.first_child[static_cast<std::size_t>(v)] =
                        static_cast<std::int32_t>(t.size());
                for (std::int64_t c = 0; c < k; ++c) {
                    t.parent.push_back(static_cast<std::int32_t>(v));
                    t.first_child.push_back(-1);
                    t.n_children.push_back(0);
                }
            }
            if (capped) break;
            t.level_start.push_back(static_cast<std::int32_t>(t.size()));
            alive = t.level_start[g + 2] > t.level_start[g + 1];
        }
        if (capped)
            throw std::runtime_error(
                "sample_conditioned: node cap hit; refusing to truncate");
        if (alive) return t;
    }
    throw std::runtime_error("sample_conditioned: retry budget exhausted");
}

ReducedTree reduce(const DiscreteTree& tree, std::int32_t n) {
    if (n < 0 || n > tree.height())
        throw std::invalid_argument("reduce: tree does not reach generation n");

    const auto size = static_cast<std::size_t>(tree.size());
    std::vector<char> keep(size, 0);
    const auto gen_lo = [&](std::int32_t g) {
        return static_cast<std::int64_t>(tree.level_start[g]);
    };
    const auto gen_hi = [&](std::int32_t g) {
        return static_cast<std::int64_t>(tree.level_start[g + 1]);
    };
    for (std::int64_t v = gen_lo(n); v < gen_hi(n); ++v)
        keep[static_cast<std::size_t>(v)] = 1;
    for (std::int32_t g = n; g > 0; --g)
        for (std::int64_t v = gen_lo(g); v < gen_hi(g); ++v)
            if (keep[static_cast<std::size_t>(v)])
                keep[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(v)])] = 1;
    if (!keep[0]) throw std::logic_error("reduce: root lost");

    // Compact in BFS order; old BFS order restricted to kept nodes is still
    // BFS, and children stay contiguous.
    std::vector<std::int32_t> remap(size, -1);
    ReducedTree rt;
    rt.n = n;
    for (std::int32_t g = 0; g <= n; ++g) {
        rt.level_start.push_back(static_cast<std::int32_t>(rt.parent.size()));
        for (std::int64_t v = gen_lo(g); v < gen_hi(g); ++v) {
            if (!keep[static_cast<std::size_t>(v)]) continue;
            remap[static_cast<std::size_t>(v)] =
                static_cast<std::int32_t>(rt.parent.size());
            std::int32_t p = tree.parent[static_cast<std::size_t>(v)];
            rt.parent.push_back(p < 0 ? -1 : remap[static_cast<std::size_t>(p)]);
            rt.first_child.push_back(-1);
            rt.n_children.push_back(0);
        }
    }
    rt.level_start.push_back(static_cast<std::int32_t>(rt.parent.size()));
    for (std::size_t v = 1; v < rt.parent.size(); ++v) {
        auto p = static_cast<std::size_t>(rt.parent[v]);
        if (rt.n_children[p] == 0) rt.first_child[p] = static_cast<std::int32_t>(v);
        ++rt.n_children[p];
    }

    // Electrical annotations, leaves upward.
    const auto m = rt.parent.size();
    rt.resistance.assign(m, 0.0);
    rt.split_w.assign(m, 1.0);
    rt.log_split.assign(m, 0.0);
    for (std::int32_t g = n - 1; g >= 0; --g) {
        for (std::int64_t v = rt.level_start[g]; v < rt.level_start[g + 1]; ++v) {
            auto vi = static_cast<std::size_t>(v);
            double s = 0.0;
            for (std::int32_t c = 0; c < rt.n_children[vi]; ++c) {
                auto ci = static_cast<std::size_t>(rt.first_child[vi] + c);
                s += 1.0 / (1.0 + rt.resistance[ci]);
            }
            rt.resistance[vi] = 1.0 / s;
            for (std::int32_t c = 0; c < rt.n_children[vi]; ++c) {
                auto ci = static_cast<std::size_t>(rt.first_child[vi] + c);
                rt.split_w[ci] = (1.0 / (1.0 + rt.resistance[ci])) / s;
                rt.log_split[ci] = std::log(rt.split_w[ci]);
            }
        }
    }
    return rt;
}

double conductance_n(const ReducedTree& rt) {
    return 1.0 / (1.0 + rt.resistance[0]);
}

std::int64_t level_size(const ReducedTree& rt, std::int32_t m) {
    if (m < 0 || m > rt.n) throw std::invalid_argument("level_size: m outside [0,n]");
    return rt.level_start[static_cast<std::size_t>(m) + 1] -
           rt.level_start[static_cast<std::size_t>(m)];
}

HarmonicSample harmonic_exact(const ReducedTree& rt, Rng& rng) {
    HarmonicSample s;
    s.ray.reserve(static_cast<std::size_t>(rt.n) + 1);
    s.cum_log.reserve(static_cast<std::size_t>(rt.n) + 1);
    std::int32_t v = 0;
    double acc = 0.0;
    s.ray.push_back(0);
    s.cum_log.push_back(0.0);
    for (std::int32_t g = 0; g < rt.n; ++g) {
        auto vi = static_cast<std::size_t>(v);
        double u = rng.u01();
        std::int32_t chosen = rt.n_children[vi] - 1;  // guard against fp leftovers
        double run = 0.0;
        for (std::int32_t c = 0; c < rt.n_children[vi]; ++c) {
            run += rt.split_w[static_cast<std::size_t>(rt.first_child[vi] + c)];
            if (u <= run) {
                chosen = c;
                break;
            }
        }
        v = rt.first_child[vi] + chosen;
        acc += rt.log_split[static_cast<std::size_t>(v)];
        s.ray.push_back(v);
        s.cum_log.push_back(acc);
    }
    s.log_mu = acc;
    return s;
}

double mu_ball(const HarmonicSample& s, std::int32_t j) {
    auto n = static_cast<std::int32_t>(s.cum_log.size()) - 1;
    if (j < 0 || j > n) throw std::invalid_argument("mu_ball: radius outside [0,n]");
    return std::exp(s.cum_log[static_cast<std::size_t>(n - j)]);
}

std::int64_t srw_hit(const ReducedTree& rt, Rng& rng, std::int64_t step_cap) {
    if (rt.n == 0) return 0;
    std::int32_t v = 0;
    const auto leaf_lo = rt.level_start[static_cast<std::size_t>(rt.n)];
    for (std::int64_t step = 0; step < step_cap; ++step) {
        auto vi = static_cast<std::size_t>(v);
        std::int32_t deg = rt.n_children[vi] + (v == 0 ? 0 : 1);
        auto pick = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(deg)));
        if (v != 0 && pick == rt.n_children[vi])
            v = rt.parent[vi];
        else
            v = rt.first_child[vi] + pick;
        if (v >= leaf_lo) return v;
    }
    throw std::runtime_error("srw_hit: step cap exceeded");
}

std::vector<double> leaf_mu(const ReducedTree& rt) {
    std::vector<double> mu(static_cast<std::size_t>(rt.size()), 0.0);
    mu[0] = 1.0;
    for (std::size_t v = 1; v < mu.size(); ++v)
        mu[v] = mu[static_cast<std::size_t>(rt.parent[v])] * rt.split_w[v];
    auto lo = static_cast<std::size_t>(rt.level_start[static_cast<std::size_t>(rt.n)]);
    return std::vector<double>(mu.begin() + static_cast<std::ptrdiff_t>(lo), mu.end());
}

double mean_log_mu(const ReducedTree& rt) {
    std::vector<double> s(static_cast<std::size_t>(rt.size()), 0.0);
    for (std::int64_t v = rt.size() - 1; v >= 0; --v) {
        auto vi = static_cast<std::size_t>(v);
        double acc = 0.0;
        for (std::int32_t c = 0; c < rt.n_children[vi]; ++c) {
            auto ci = static_cast<std::size_t>(rt.first_child[vi] + c);
            acc += rt.split_w[ci] * (s[ci] - rt.log_split[ci]);
        }
        s[vi] = acc;
    }
    return s[0];
}

void dump_reduced(const ReducedTree& rt, std::ostream& os) {
    os << "id,parent,generation,resistance,split_weight\n";
    for (std::int32_t g = 0; g <= rt.n; ++g)
        for (std::int64_t v = rt.level_start[g]; v < rt.level_start[g + 1]; ++v) {
            auto vi = static_cast<std::size_t>(v);
            os << v << ',' << rt.parent[vi] << ',' << g << ',' << rt.resistance[vi]
               << ',' << rt.split_w[vi] << '\n';
        }
}

}  // namespace gwh
