#include "crn/genome.hpp"
#include "crn/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace crn;

TEST_CASE("genome bounds") {
    const auto [lo, hi] = genome_bounds(3, 10);
    CHECK(lo == doctest::Approx(-0.499999).epsilon(1e-12));
    CHECK(hi == doctest::Approx(3.499999).epsilon(1e-12));
    const auto b10 = genome_bounds(10, 4);
    CHECK(b10.lo == doctest::Approx(-0.499999).epsilon(1e-12));
    CHECK(b10.hi == doctest::Approx(10.499999).epsilon(1e-12));
    CHECK(std::lround(lo) == 0);
    CHECK(std::lround(hi) == 3);
}

TEST_CASE("round_genome") {
    Eigen::VectorXd v(5);
    v << 0.4, 2.6, 1.1, 0.0, 3.49;
    const Genome g = make_genome(v, 3, 1);
    CHECK(round_genome(g) == std::vector<int>{0, 3, 1, 0, 3});

    const auto [lo, hi] = genome_bounds(3, 1);
    Eigen::VectorXd edges(5);
    edges << lo, hi, lo, hi, lo;
    CHECK(round_genome(make_genome(edges, 3, 1)) == std::vector<int>{0, 3, 0, 3, 0});

    Eigen::VectorXd bad(5);
    bad << 0, 0, 0, 0, 3.6;
    CHECK_THROWS_AS(make_genome(bad, 3, 1), std::invalid_argument);
}

TEST_CASE("rounding a uniform genome hits all integers 0..S uniformly") {
    const int s_count = 3;
    const auto [lo, hi] = genome_bounds(s_count, 1);
    auto rng = make_rng(99);
    std::uniform_real_distribution<double> u(lo, hi);
    const int draws = 1'000'000;
    std::vector<long> counts(static_cast<size_t>(s_count) + 1, 0);
    for (int i = 0; i < draws; ++i) {
        const long v = std::lround(u(rng));
        REQUIRE(v >= 0);
        REQUIRE(v <= s_count);
        ++counts[static_cast<size_t>(v)];
    }
    // Chi-squared against the uniform expectation; 3 dof, 1e-3 quantile ~ 16.3.
    const double expected = static_cast<double>(draws) / (s_count + 1);
    double chi2 = 0;
    for (long c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 16.3);
}

TEST_CASE("decode basic slot rules") {
    const DecodedNetwork d = decode({1, 2, 3, 0, 0}, 3, 1);
    CHECK(d.network.reaction_count() == 1);
    CHECK(d.network.reaction(0) == Reaction({{1, 1}, {2, 1}}, {{3, 1}}));
    CHECK(d.raw_reaction_count == 1);
    CHECK(d.excluded_count == 0);

    const DecodedNetwork no_reactants = decode({0, 0, 1, 2, 3}, 3, 1);
    CHECK(no_reactants.network.reaction_count() == 0);
    CHECK(no_reactants.excluded_count == 1);

    const DecodedNetwork dimer = decode({1, 1, 2, 0, 0}, 3, 1);
    CHECK(dimer.network.reaction_count() == 1);
    CHECK(stoichiometric_matrix(dimer.network).col(0) == Eigen::Vector3i(-2, 1, 0));

    const DecodedNetwork empty = decode({0, 0, 0, 0, 0}, 3, 1);
    CHECK(empty.raw_reaction_count == 0);
    CHECK(empty.excluded_count == 0);

    // No net change: x1 -> x1 is read as "no reaction occurring".
    const DecodedNetwork identity = decode({1, 0, 1, 0, 0}, 3, 1);
    CHECK(identity.network.reaction_count() == 0);
    CHECK(identity.excluded_count == 1);
}

TEST_CASE("decode removes structural duplicates") {
    const DecodedNetwork d = decode({2, 1, 3, 0, 0, 1, 2, 3, 0, 0}, 3, 2);
    CHECK(d.raw_reaction_count == 2);
    CHECK(d.duplicate_count == 1);
    CHECK(d.network.reaction_count() == 1);
}

TEST_CASE("decode is invariant under within-side slot permutations") {
    auto rng = make_rng(7);
    std::uniform_int_distribution<int> slot(0, 4);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> ints(10);
        for (auto& v : ints) v = slot(rng);
        std::vector<int> permuted = ints;
        std::swap(permuted[0], permuted[1]);             // reactant slots of tuple 1
        std::swap(permuted[7], permuted[9]);             // product slots of tuple 2
        std::swap(permuted[2], permuted[3]);
        const auto a = decode(ints, 4, 2);
        const auto b = decode(permuted, 4, 2);
        CHECK(a.network.canonical_key() == b.network.canonical_key());
    }
}

TEST_CASE("every decoded network respects q <= q_max and the column-sign rule") {
    auto rng = make_rng(8);
    std::uniform_int_distribution<int> slot(0, 5);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> ints(20);
        for (auto& v : ints) v = slot(rng);
        const auto d = decode(ints, 5, 4);
        CHECK(d.network.reaction_count() <= 4);
        const Eigen::MatrixXi n = stoichiometric_matrix(d.network);
        for (int j = 0; j < n.cols(); ++j) {
            CHECK(n.col(j).minCoeff() < 0);
            CHECK(n.col(j).maxCoeff() > 0);
        }
        CHECK(d.network.reaction_count() ==
              d.raw_reaction_count - d.excluded_count - d.duplicate_count);
    }
}

TEST_CASE("encode/decode round trip reproduces the canonical network") {
    auto rng = make_rng(9);
    std::uniform_int_distribution<int> slot(0, 4);
    int nonempty = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> ints(15);
        for (auto& v : ints) v = slot(rng);
        const auto d = decode(ints, 4, 3);
        if (d.network.reaction_count() > 0) ++nonempty;
        const auto slots = encode_slots(d.network, 3);
        const auto redecoded = decode(slots, 4, 3);
        CHECK(redecoded.network.canonical_key() == d.network.canonical_key());
        CHECK(redecoded.excluded_count == 0);
        CHECK(redecoded.duplicate_count == 0);
    }
    CHECK(nonempty > 100);  // the generator actually exercises the round trip
}
