#include "gwh/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gwh {

int default_threads() {
    if (const char* env = std::getenv("GWHARM_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_blocks(std::int64_t n, int threads,
                     const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    if (threads <= 0) threads = default_threads();
    const std::int64_t nblocks = (n + kParallelBlock - 1) / kParallelBlock;
    if (threads == 1 || nblocks == 1) {
        for (std::int64_t b = 0; b < nblocks; ++b) {
            std::int64_t lo = b * kParallelBlock;
            std::int64_t hi = std::min(n, lo + kParallelBlock);
            fn(lo, hi);
        }
        return;
    }
    std::atomic<std::int64_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            std::int64_t b = cursor.fetch_add(1);
            if (b >= nblocks) return;
            std::int64_t lo = b * kParallelBlock;
            std::int64_t hi = std::min(n, lo + kParallelBlock);
            fn(lo, hi);
        }
    };
    std::vector<std::thread> team;
    int nw = static_cast<int>(std::min<std::int64_t>(threads, nblocks));
    team.reserve(static_cast<std::size_t>(nw));
    for (int t = 0; t < nw; ++t) team.emplace_back(worker);
    for (auto& th : team) th.join();
}

}  // namespace gwh
