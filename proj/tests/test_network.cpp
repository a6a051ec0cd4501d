#include "crn/network.hpp"
#include "crn/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace crn;

namespace {

// Eq. (6)-style network: x1 + x2 -> x3 + x4 and x3 -> x4.
ReactionNetwork example_network() {
    return ReactionNetwork(4, {
                                  Reaction({{1, 1}, {2, 1}}, {{3, 1}, {4, 1}}, 0.7),
                                  Reaction({{3, 1}}, {{4, 1}}, 0.4),
                              });
}

}  // namespace

TEST_CASE("stoichiometric matrix of the two-reaction example") {
    const Eigen::MatrixXi n = stoichiometric_matrix(example_network());
    Eigen::MatrixXi expected(4, 2);
    expected << -1, 0, -1, 0, 1, -1, 1, 1;
    CHECK(n == expected);
}

TEST_CASE("stoichiometric matrix of an empty network is S x 0") {
    const Eigen::MatrixXi n = stoichiometric_matrix(ReactionNetwork(4));
    CHECK(n.rows() == 4);
    CHECK(n.cols() == 0);
}

TEST_CASE("stoichiometric matrix with a bimolecular self-reaction") {
    // 2 x1 -> x2; x2 -> x3 over three species.
    const ReactionNetwork net(3, {Reaction({{1, 2}}, {{2, 1}}), Reaction({{2, 1}}, {{3, 1}})});
    Eigen::MatrixXi expected(3, 2);
    expected << -2, 0, 1, -1, 0, 1;
    CHECK(stoichiometric_matrix(net) == expected);
}

TEST_CASE("mass action rate") {
    Eigen::VectorXd x(4);
    x << 2, 3, 0, 0;
    const Reaction r({{1, 1}, {2, 1}}, {{3, 1}}, 0.1);
    CHECK(r.mass_action_rate(x) == doctest::Approx(0.6).epsilon(1e-12));

    Eigen::VectorXd zero = x;
    zero(0) = 0;
    CHECK(r.mass_action_rate(zero) == 0.0);

    Eigen::VectorXd y(3);
    y << 2, 0, 0;
    const Reaction dimer({{1, 2}}, {{2, 1}}, 0.5);
    CHECK(dimer.mass_action_rate(y) == doctest::Approx(2.0).epsilon(1e-12));

    const Reaction unset({{1, 1}, {2, 1}}, {{3, 1}});
    CHECK_THROWS_AS(unset.mass_action_rate(x), std::logic_error);
}

TEST_CASE("flux matches the closed form of the example network") {
    auto rng = make_rng(11);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const double k1 = 0.7, k2 = 0.4;
    const ReactionNetwork net = example_network();
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = u(rng);
        const double r1 = k1 * x(0) * x(1);
        const double r2 = k2 * x(2);
        const Eigen::VectorXd f = flux(net, x);
        CHECK(f(0) == doctest::Approx(-r1).epsilon(1e-12));
        CHECK(f(1) == doctest::Approx(-r1).epsilon(1e-12));
        CHECK(f(2) == doctest::Approx(r1 - r2).epsilon(1e-12));
        CHECK(f(3) == doctest::Approx(r1 + r2).epsilon(1e-12));
    }
}

TEST_CASE("flux vanishes at zero concentrations") {
    const Eigen::VectorXd f = flux(example_network(), Eigen::VectorXd::Zero(4));
    CHECK(f.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flux of x1 -> x2 matches the analytic exponential derivative") {
    const ReactionNetwork net(2, {Reaction({{1, 1}}, {{2, 1}}, 0.5)});
    for (double t : {0.0, 0.5, 1.0, 3.0}) {
        Eigen::VectorXd x(2);
        x << std::exp(-0.5 * t), 1.0 - std::exp(-0.5 * t);
        const Eigen::VectorXd f = flux(net, x);
        CHECK(f(0) == doctest::Approx(-0.5 * std::exp(-0.5 * t)).epsilon(1e-12));
        CHECK(f(1) == doctest::Approx(0.5 * std::exp(-0.5 * t)).epsilon(1e-12));
    }
}

TEST_CASE("conservation consistency: A N = 0 implies A flux = 0") {
    const ReactionNetwork net = example_network();
    // equal masses: x1 + x2 -> x3 + x4 and x3 -> x4 force m3 = m4 = (m1 + m2) / 2.
    Eigen::MatrixXd a(1, 4);
    a << 1, 1, 1, 1;
    CHECK((a * stoichiometric_matrix(net).cast<double>()).cwiseAbs().maxCoeff() == 0.0);
    auto rng = make_rng(12);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = u(rng);
        CHECK(std::abs((a * flux(net, x))(0)) < 1e-14);
    }
}

TEST_CASE("flux Jacobian agrees with central differences") {
    const ReactionNetwork net = example_network();
    auto rng = make_rng(13);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    const double h = 1e-6;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = u(rng);
        for (int j = 0; j < 4; ++j) {
            Eigen::VectorXd xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            const Eigen::VectorXd fd = (flux(net, xp) - flux(net, xm)) / (2 * h);
            // Analytic Jacobian column: flux is a degree-<=2 polynomial.
            Eigen::VectorXd analytic(4);
            const double k1 = 0.7, k2 = 0.4;
            const double dr1 = (j == 0) ? k1 * x(1) : (j == 1) ? k1 * x(0) : 0.0;
            const double dr2 = (j == 2) ? k2 : 0.0;
            analytic << -dr1, -dr1, dr1 - dr2, dr1 + dr2;
            for (int i = 0; i < 4; ++i) {
                const double scale = std::max(1.0, std::abs(analytic(i)));
                CHECK(std::abs(fd(i) - analytic(i)) / scale < 1e-6);
            }
        }
    }
}

TEST_CASE("reaction canonicalization ignores entry order and merges multiplicity") {
    const Reaction a({{2, 1}, {1, 1}}, {{4, 1}, {3, 1}});
    const Reaction b({{1, 1}, {2, 1}}, {{3, 1}, {4, 1}});
    CHECK(a == b);
    const Reaction twice({{1, 1}, {1, 1}}, {{2, 1}});
    const Reaction merged({{1, 2}}, {{2, 1}});
    CHECK(twice == merged);
}

TEST_CASE("reaction validation") {
    // No net change for any species -> no signs in the column.
    CHECK_THROWS_AS(Reaction({{1, 1}}, {{1, 1}}), std::invalid_argument);
    // Too many reactants / products.
    CHECK_THROWS_AS(Reaction({{1, 2}, {2, 1}}, {{3, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(Reaction({{1, 1}}, {{2, 2}, {3, 2}}), std::invalid_argument);
    // Catalytic species is fine as long as the column keeps both signs.
    const Reaction catalytic({{1, 1}, {2, 1}}, {{3, 1}, {2, 1}});
    CHECK(catalytic.net_coefficient(2) == 0);
    CHECK(catalytic.net_coefficient(1) == -1);
    CHECK(catalytic.net_coefficient(3) == 1);
}

TEST_CASE("network validation") {
    CHECK_THROWS_AS(ReactionNetwork(2, {Reaction({{1, 1}}, {{3, 1}})}), std::invalid_argument);
    CHECK_THROWS_AS(ReactionNetwork(3, {Reaction({{1, 1}}, {{2, 1}}),
                                        Reaction({{1, 1}}, {{2, 1}})}),
                    std::invalid_argument);
}

TEST_CASE("textual notation") {
    const Reaction r({{1, 1}, {2, 1}}, {{3, 1}, {4, 1}}, 0.1);
    CHECK(to_string(r) == "0.1: x1 + x2 -> x3 + x4");
    const Reaction dimer({{1, 2}}, {{2, 1}}, 0.5);
    CHECK(to_string(dimer) == "0.5: 2*x1 -> x2");
    const Reaction unset({{1, 1}}, {{2, 1}});
    CHECK(to_string(unset) == "?: x1 -> x2");
}

TEST_CASE("canonical key is order independent") {
    const Reaction a({{1, 1}, {2, 1}}, {{3, 1}});
    const Reaction b({{3, 1}}, {{4, 1}});
    CHECK(ReactionNetwork(4, {a, b}).canonical_key() == ReactionNetwork(4, {b, a}).canonical_key());
    CHECK(ReactionNetwork(4, {a}).canonical_key() != ReactionNetwork(4, {b}).canonical_key());
}
