#pragma once

#include <cmath>
#include <cstdint>

namespace gwh {

// Counter-keyed splitmix64 streams.  Every random decision in the project is
// drawn from a stream keyed by (seed, label, index...), so results do not
// depend on thread count or evaluation order: the consumer of sample i always
// builds the same stream regardless of which worker runs it.
class Rng {
public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Derive a stream from a seed and up to three labels.  Labels are folded
    // in one mix round each, which is enough to decorrelate neighbouring
    // indices for Monte Carlo purposes.
    static Rng stream(std::uint64_t seed, std::uint64_t a,
                      std::uint64_t b = 0, std::uint64_t c = 0) {
        std::uint64_t s = mix(seed);
        s = mix(s ^ a);
        s = mix(s ^ b);
        s = mix(s ^ c);
        return Rng(s);
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0,1): 53 significant bits, offset by half
    // an ulp so neither endpoint is attainable.  Safe to feed into log().
    double u01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53;
    }

    double exp1() { return -std::log(u01()); }

    // Uniform integer in [0,n).  Multiply-shift; the bias is n / 2^64.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// Fold extra labels into a fresh seed, for handing a disjoint stream family
// to a subcomputation (e.g. one bootstrap replicate).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0) {
    return Rng::mix(Rng::mix(Rng::mix(seed) ^ a) ^ b);
}

// Stream labels.  One per consumer so independent estimators sharing a seed
// never overlap.
namespace stream_label {
inline constexpr std::uint64_t pool_iter   = 0x01;
inline constexpr std::uint64_t beta2       = 0x02;
inline constexpr std::uint64_t beta1       = 0x03;
inline constexpr std::uint64_t kappa       = 0x04;
inline constexpr std::uint64_t kappa_inner = 0x05;
inline constexpr std::uint64_t bootstrap   = 0x06;
inline constexpr std::uint64_t ctgw        = 0x07;
inline constexpr std::uint64_t ctgw_pool   = 0x08;
inline constexpr std::uint64_t discrete    = 0x09;
inline constexpr std::uint64_t walk        = 0x0a;
inline constexpr std::uint64_t speed       = 0x0b;
inline constexpr std::uint64_t identity    = 0x0c;
inline constexpr std::uint64_t scan        = 0x0d;
inline constexpr std::uint64_t offspring   = 0x0e;
inline constexpr std::uint64_t ode         = 0x0f;
inline constexpr std::uint64_t pairs       = 0x10;
inline constexpr std::uint64_t grid        = 0x11;
inline constexpr std::uint64_t moment      = 0x12;
inline constexpr std::uint64_t star        = 0x13;
}  // namespace stream_label

}  // namespace gwh
