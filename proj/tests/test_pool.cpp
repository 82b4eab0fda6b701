#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gwh/pool.hpp"

using namespace gwh;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<char> slurp(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f != nullptr);
    std::fseek(f, 0, SEEK_END);
    long sz = std::ftell(f);
    std::fseek(f, 0, SEEK_SET);
    std::vector<char> buf(static_cast<std::size_t>(sz));
    REQUIRE(std::fread(buf.data(), 1, buf.size(), f) == buf.size());
    std::fclose(f);
    return buf;
}

}  // namespace

TEST_CASE("constant pools report their moments exactly") {
    ConductancePool p = make_constant_pool(1.5, 1000, 2.0);
    CHECK(p.size() == 1000);
    CHECK(p.mean() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.min_sample() == 2.0);
    CHECK(pool_moment(p, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(pool_moment(p, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("finalize rebuilds the sorted view") {
    ConductancePool p;
    p.alpha = 2.0;
    p.samples = {3.0, 1.0, 2.0};
    p.finalize();
    REQUIRE(p.sorted.size() == 3);
    CHECK(p.sorted[0] == 1.0);
    CHECK(p.sorted[1] == 2.0);
    CHECK(p.sorted[2] == 3.0);
    CHECK(p.min_sample() == 1.0);
}

TEST_CASE("wasserstein1 is the mean gap of sorted samples") {
    ConductancePool a, b;
    a.alpha = b.alpha = 2.0;
    a.samples = {1.0, 5.0, 3.0};
    b.samples = {2.0, 2.0, 7.0};
    a.finalize();
    b.finalize();
    // sorted gaps |1-2| + |3-2| + |5-7| = 4, over 3 samples
    CHECK(wasserstein1(a, b) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(wasserstein1(a, a) == 0.0);

    ConductancePool c;
    c.alpha = 2.0;
    c.samples = {1.0, 2.0};
    c.finalize();
    CHECK_THROWS_AS(wasserstein1(a, c), std::invalid_argument);
}

TEST_CASE("pool files round-trip bit for bit") {
    ConductancePool p = make_constant_pool(1.7, 500, 1.0);
    for (std::size_t i = 0; i < p.samples.size(); ++i)
        p.samples[i] = 1.0 + 0.001 * static_cast<double>(i * i % 97);
    p.finalize();
    p.seed = 4242;
    p.iterations = 17;
    p.converged = false;
    p.final_d1 = 0.0125;

    std::string path = temp_path("gwh_pool_roundtrip.bin");
    save_pool(p, path);
    ConductancePool q = load_pool(path);

    CHECK(q.alpha == p.alpha);
    CHECK(q.seed == p.seed);
    CHECK(q.iterations == p.iterations);
    CHECK(q.converged == p.converged);
    CHECK(q.final_d1 == p.final_d1);
    REQUIRE(q.samples.size() == p.samples.size());
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
        CHECK(q.samples[i] == p.samples[i]);
        CHECK(q.sorted[i] == p.sorted[i]);
    }

    // Saving the loaded pool reproduces both files byte for byte.
    std::string path2 = temp_path("gwh_pool_roundtrip2.bin");
    save_pool(q, path2);
    CHECK(slurp(path2) == slurp(path));
    CHECK(slurp(path2 + ".json") == slurp(path + ".json"));

    std::filesystem::remove(path);
    std::filesystem::remove(path + ".json");
    std::filesystem::remove(path2);
    std::filesystem::remove(path2 + ".json");
}

TEST_CASE("loading a missing pool fails loudly") {
    CHECK_THROWS_AS(load_pool(temp_path("gwh_pool_nonexistent.bin")),
                    std::runtime_error);
}
