#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gwh/ctgw.hpp"
#include "gwh/offspring.hpp"
#include "gwh/rng.hpp"
#include "gwh/stats.hpp"

using namespace gwh;

TEST_CASE("trees are reproducible from their stream") {
    Rng r1 = Rng::stream(5, stream_label::ctgw, 0, 0);
    Rng r2 = Rng::stream(5, stream_label::ctgw, 0, 0);
    CtgwTree a = sample_ctgw(1.5, 1.0, 100000, r1);
    CtgwTree b = sample_ctgw(1.5, 1.0, 100000, r2);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].parent == b.nodes[i].parent);
        CHECK(a.nodes[i].birth == b.nodes[i].birth);
        CHECK(a.nodes[i].death == b.nodes[i].death);
    }
}

TEST_CASE("lifetimes are unit exponentials, births are the parent's death") {
    std::vector<double> lifetimes;
    for (int t = 0; t < 2000; ++t) {
        Rng rng = Rng::stream(6, stream_label::ctgw, 2, static_cast<std::uint64_t>(t));
        CtgwTree tree = sample_ctgw(2.0, 1.0, 100000, rng);
        REQUIRE(!tree.overflow);
        for (const CtgwNode& n : tree.nodes) {
            lifetimes.push_back(n.death - n.birth);
            if (n.parent >= 0) {
                CHECK(n.birth ==
                      tree.nodes[static_cast<std::size_t>(n.parent)].death);
                CHECK(n.birth < tree.r);  // children only spawn below the cut
            }
        }
    }
    CHECK(ks_exp1_pvalue(lifetimes) > 1e-5);
}

TEST_CASE("branch sizes follow the offspring law") {
    OffspringDist law = OffspringDist::theta(1.5);
    std::vector<std::int64_t> counts(4, 0);  // cells 2,3,4,>=5
    for (int t = 0; t < 3000; ++t) {
        Rng rng = Rng::stream(7, stream_label::ctgw, 3, static_cast<std::uint64_t>(t));
        CtgwTree tree = sample_ctgw(1.5, 1.2, 1000000, rng);
        REQUIRE(!tree.overflow);
        for (const CtgwNode& n : tree.nodes) {
            if (n.death < tree.r) {
                REQUIRE(n.n_children >= 2);
                counts[static_cast<std::size_t>(
                    std::min<std::int32_t>(n.n_children - 2, 3))] += 1;
            } else {
                CHECK(n.n_children == 0);
            }
        }
    }
    std::vector<double> probs = {law.pmf(2), law.pmf(3), law.pmf(4), law.tail(5)};
    CHECK(chi_square_pvalue(counts, probs) > 1e-6);
}

TEST_CASE("level counts match a hand count and validate their argument") {
    Rng rng = Rng::stream(8, stream_label::ctgw, 4, 0);
    CtgwTree tree = sample_ctgw(1.5, 2.0, 1000000, rng);
    CHECK(level_count(tree, 0.0) == 1);
    for (double s : {0.3, 1.0, 1.7}) {
        std::int64_t manual = 0;
        for (const CtgwNode& n : tree.nodes)
            if (n.birth < s && s <= n.death) manual += 1;
        CHECK(level_count(tree, s) == manual);
    }
    CHECK_THROWS_AS(level_count(tree, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(level_count(tree, 2.1), std::invalid_argument);
}

TEST_CASE("the normalized level count is a mean-one martingale") {
    // Binary branching: the level count is geometric, so plain CLT bounds apply.
    MeanVar mv;
    for (int t = 0; t < 3000; ++t) {
        Rng rng = Rng::stream(9, stream_label::ctgw, 5, static_cast<std::uint64_t>(t));
        CtgwTree tree = sample_ctgw(2.0, 1.0, 1000000, rng);
        mv.add(martingale_stat(tree, 2.0));
    }
    CHECK(std::fabs(mv.mean - 1.0) < 5.0 * mv.se());
}

TEST_CASE("population mean through the jump chain hits the exponential profile") {
    OffspringDist law = OffspringDist::theta(2.0);
    MeanVar mv;
    std::vector<std::int64_t> cells(5, 0);  // population 1,2,3,4,>=5
    for (int t = 0; t < 3000; ++t) {
        Rng rng = Rng::stream(10, stream_label::ctgw, 6, static_cast<std::uint64_t>(t));
        std::int64_t n = level_population(law, 1.0, rng);
        REQUIRE(n >= 1);
        mv.add(static_cast<double>(n));
        cells[static_cast<std::size_t>(std::min<std::int64_t>(n - 1, 4))] += 1;
    }
    CHECK(std::fabs(mv.mean - std::exp(1.0)) < 5.0 * mv.se());
    // Binary splitting makes the level population geometric with p = e^{-r}.
    double p = std::exp(-1.0);
    std::vector<double> probs(5, 0.0);
    for (int k = 0; k < 4; ++k) probs[static_cast<std::size_t>(k)] =
        p * std::pow(1.0 - p, k);
    probs[4] = std::pow(1.0 - p, 4);
    CHECK(chi_square_pvalue(cells, probs) > 1e-6);
}

TEST_CASE("height map onto the unit interval preserves structure") {
    Rng rng = Rng::stream(11, stream_label::ctgw, 7, 0);
    CtgwTree tree = sample_ctgw(2.0, 1.2, 1000000, rng);
    CtgwTree flat = tree;
    map_to_delta(flat);
    CHECK(flat.r == doctest::Approx(-std::expm1(-1.2)).epsilon(1e-15));
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        CHECK(flat.nodes[i].birth ==
              doctest::Approx(-std::expm1(-tree.nodes[i].birth)).epsilon(1e-15));
        CHECK(flat.nodes[i].death ==
              doctest::Approx(-std::expm1(-tree.nodes[i].death)).epsilon(1e-15));
        CHECK(flat.nodes[i].birth < flat.nodes[i].death);
        CHECK(flat.nodes[i].death <= 1.0);
    }
}

TEST_CASE("caps surface as overflow flags or hard errors") {
    Rng rng = Rng::stream(12, stream_label::ctgw, 8, 0);
    CtgwTree tree = sample_ctgw(2.0, 6.0, 10, rng);
    CHECK(tree.overflow);

    OffspringDist law = OffspringDist::theta(2.0);
    Rng rng2 = Rng::stream(12, stream_label::ctgw, 9, 0);
    CHECK_THROWS_AS(level_population(law, 8.0, rng2, 4), std::runtime_error);
}

TEST_CASE("transform of the level count agrees with its closed form") {
    LaplaceCheck chk = level_laplace_check(1.5, 1.0, 1.0, 4000, 515);
    CHECK(chk.closed_form == doctest::Approx(0.165725462753).epsilon(1e-9));
    CHECK(chk.se > 0.0);
    CHECK(std::fabs(chk.z) < 4.0);
    CHECK_THROWS_AS(level_laplace_check(2.0, 1.0, 1.0, 100, 1),
                    std::invalid_argument);
}

TEST_CASE("transform of the growth limit matches reference values") {
    CHECK(w_laplace_closed(1.5, 0.5) == doctest::Approx(0.828427124746).epsilon(1e-11));
    CHECK(w_laplace_closed(1.5, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(w_laplace_closed(1.5, 2.0) == doctest::Approx(0.656854249492).epsilon(1e-11));
    CHECK(w_laplace_closed(1.8, 0.5) == doctest::Approx(0.716473486563).epsilon(1e-11));
    CHECK(w_laplace_closed(1.8, 1.0) == doctest::Approx(0.579551792373).epsilon(1e-11));
    CHECK(w_laplace_closed(1.8, 2.0) == doctest::Approx(0.432946973126).epsilon(1e-11));
    // At the binary endpoint the limit is Exp(1): transform 1 - u/(1+u).
    CHECK(w_laplace_closed(2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w_laplace_closed(2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tree dumps are one line per node plus a header") {
    Rng rng = Rng::stream(13, stream_label::ctgw, 10, 0);
    CtgwTree tree = sample_ctgw(1.5, 0.8, 100000, rng);
    std::ostringstream os;
    dump_tree(tree, os);
    std::string text = os.str();
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') lines += 1;
    CHECK(lines == tree.nodes.size() + 1);
    CHECK(text.rfind("id,parent,birth,death\n", 0) == 0);
}
