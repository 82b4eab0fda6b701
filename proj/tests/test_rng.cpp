#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>

#include "gwh/rng.hpp"

using namespace gwh;

TEST_CASE("streams are reproducible and label-separated") {
    Rng a = Rng::stream(42, stream_label::pool_iter, 3, 7);
    Rng b = Rng::stream(42, stream_label::pool_iter, 3, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

    // Any label change moves the whole stream.
    Rng c = Rng::stream(42, stream_label::pool_iter, 3, 8);
    Rng d = Rng::stream(42, stream_label::beta2, 3, 7);
    Rng e = Rng::stream(43, stream_label::pool_iter, 3, 7);
    Rng base = Rng::stream(42, stream_label::pool_iter, 3, 7);
    std::uint64_t first = base.next();
    CHECK(c.next() != first);
    CHECK(d.next() != first);
    CHECK(e.next() != first);
}

TEST_CASE("u01 stays inside the open unit interval") {
    Rng rng = Rng::stream(7, 1);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = rng.u01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    // Mean 1/2 with sd 1/sqrt(12 n); allow 5 sigma.
    CHECK(std::fabs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
    CHECK(lo < 0.001);
    CHECK(hi > 0.999);
}

TEST_CASE("exp1 has unit mean") {
    Rng rng = Rng::stream(11, 2);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += rng.exp1();
    CHECK(std::fabs(sum / n - 1.0) < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("below returns values in range with roughly uniform mass") {
    Rng rng = Rng::stream(13, 3);
    const std::uint64_t m = 10;
    std::int64_t counts[10] = {0};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        std::uint64_t v = rng.below(m);
        REQUIRE(v < m);
        counts[v] += 1;
    }
    for (std::int64_t c : counts) {
        // Binomial(n, 1/10): sd ~ 95; allow 6 sigma.
        CHECK(std::fabs(static_cast<double>(c) - n / 10.0) < 6.0 * std::sqrt(n * 0.1 * 0.9));
    }
}

TEST_CASE("derive_seed separates subcomputations") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 20; ++a)
        for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(99, a, b));
    CHECK(seen.size() == 400);
}
