#pragma once

#include <cstdint>
#include <functional>

namespace gwh {

// Number of worker threads to use when the caller passes threads <= 0:
// the GWHARM_THREADS environment variable if set, otherwise the hardware
// concurrency.
int default_threads();

// Run fn(begin, end) over [0, n) split into fixed-size blocks handed out via
// an atomic counter.  Block boundaries do not depend on the thread count, so
// any consumer that keys its randomness on the global index produces
// identical output for every thread count.  threads <= 1 runs inline.
void parallel_blocks(std::int64_t n, int threads,
                     const std::function<void(std::int64_t, std::int64_t)>& fn);

inline constexpr std::int64_t kParallelBlock = 4096;

}  // namespace gwh
