#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gwh {

// Empirical sample of the conductance law at the root of the reduced tree.
// Producers keep `sorted` in sync with `samples` (same multiset); consumers
// treat the pool as immutable, so it can be shared across threads freely.
struct ConductancePool {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::int64_t iterations = 0;
    bool converged = true;
    double final_d1 = 0.0;
    std::vector<double> samples;
    std::vector<double> sorted;

    std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
    void finalize();  // rebuild the sorted view
    double min_sample() const;
    double mean() const;
};

ConductancePool make_constant_pool(double alpha, std::int64_t size, double value);

// Empirical moment E[C^p].
double pool_moment(const ConductancePool& pool, double p);

// Wasserstein-1 distance between two equal-size empirical laws: the mean
// absolute difference of sorted samples.  Throws on size mismatch.
double wasserstein1(const ConductancePool& a, const ConductancePool& b);

// Pool files: raw little-endian IEEE doubles at `path`, metadata in a JSON
// sidecar at `path` + ".json".
void save_pool(const ConductancePool& pool, const std::string& path);
ConductancePool load_pool(const std::string& path);

}  // namespace gwh
