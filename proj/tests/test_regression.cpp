#include "crn/genome.hpp"
#include "crn/regression.hpp"
#include "crn/rng.hpp"
#include "crn/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace crn;

namespace {

// A smoothed experiment with exact analytic derivatives, bypassing the
// smoother: the independent oracle for the regression path.
SmoothedExperiment exact_smoothed(const ReactionNetwork& truth, const ExperimentSpec& spec,
                                  int trim = 0) {
    const ExperimentSeries series = integrate(truth, spec, {1e-10, 1e-13});
    const int kept = series.sample_count() - 2 * trim;
    SmoothedExperiment out;
    out.times = series.times.segment(trim, kept);
    out.concentrations = series.measured.block(trim, 0, kept, series.species_count());
    out.derivatives.resize(kept, series.species_count());
    for (int n = 0; n < kept; ++n)
        out.derivatives.row(n) = flux(truth, out.concentrations.row(n).transpose()).transpose();
    return out;
}

}  // namespace

TEST_CASE("design blocks match the worked example") {
    // 2 x1 -> x2; x2 -> x3: X1 = (-2[x1]^2, 0), X2 = ([x1]^2, -[x2]), X3 = (0, [x2]).
    const ReactionNetwork net(3, {Reaction({{1, 2}}, {{2, 1}}), Reaction({{2, 1}}, {{3, 1}})});
    SmoothedExperiment sm;
    const int n = 4;
    sm.times = Eigen::VectorXd::LinSpaced(n, 0, 3);
    sm.concentrations.resize(n, 3);
    sm.concentrations << 1.0, 0.5, 0.1, 0.8, 0.6, 0.2, 0.5, 0.9, 0.3, 0.2, 1.1, 0.4;
    sm.derivatives = Eigen::MatrixXd::Zero(n, 3);
    const DesignSystem sys = build_design(net, {sm});
    REQUIRE(sys.X.rows() == 12);
    REQUIRE(sys.X.cols() == 2);
    for (int i = 0; i < n; ++i) {
        const double x1 = sm.concentrations(i, 0);
        const double x2 = sm.concentrations(i, 1);
        CHECK(sys.X(i, 0) == doctest::Approx(-2 * x1 * x1));
        CHECK(sys.X(i, 1) == 0.0);
        CHECK(sys.X(n + i, 0) == doctest::Approx(x1 * x1));
        CHECK(sys.X(n + i, 1) == doctest::Approx(-x2));
        CHECK(sys.X(2 * n + i, 0) == 0.0);
        CHECK(sys.X(2 * n + i, 1) == doctest::Approx(x2));
    }
}

TEST_CASE("design dimensions and zero blocks") {
    const ReactionNetwork net(4, {Reaction({{1, 1}}, {{2, 1}}), Reaction({{2, 1}}, {{3, 1}})});
    SmoothedExperiment sm;
    sm.times = Eigen::VectorXd::LinSpaced(17, 4, 20);
    sm.concentrations = Eigen::MatrixXd::Random(17, 4);
    sm.derivatives = Eigen::MatrixXd::Zero(17, 4);
    const DesignSystem sys = build_design(net, {sm});
    CHECK(sys.X.rows() == 68);
    CHECK(sys.X.cols() == 2);
    // Species 4 takes part in no reaction: its block is all zero.
    CHECK(sys.X.block(3 * 17, 0, 17, 2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(stacked_sample_count({sm}) == 68);
}

TEST_CASE("solve_rates on orthogonal columns reduces to per-column projections") {
    DesignSystem sys;
    sys.X.resize(4, 2);
    sys.X << 1, 0, 1, 0, 0, 1, 0, -1;
    sys.y.resize(4);
    sys.y << 2.0, 4.0, 1.0, -3.0;
    const Eigen::VectorXd k = solve_rates(sys);
    CHECK(k(0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(k(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("noise-free exact-derivative data recovers the true coefficient") {
    const ReactionNetwork truth(2, {Reaction({{1, 1}}, {{2, 1}}, 0.5)});
    ExperimentSpec spec;
    spec.initial_concentrations = Eigen::Vector2d(1.0, 0.0);
    spec.t_start = 0;
    spec.t_end = 4;
    spec.sample_interval = 0.25;
    const auto smoothed = std::vector<SmoothedExperiment>{exact_smoothed(truth, spec)};
    const DesignSystem sys = build_design(truth, smoothed);
    const Eigen::VectorXd k = solve_rates(sys);
    CHECK(std::abs(k(0) - 0.5) < 1e-8);
}

TEST_CASE("exact duplicate columns split the coefficient evenly (minimum norm)") {
    DesignSystem sys;
    sys.X.resize(3, 2);
    sys.X << 1, 1, 2, 2, 3, 3;
    sys.y.resize(3);
    sys.y << 1, 2, 3;  // exactly representable with k1 + k2 = 1
    const Eigen::VectorXd k = solve_rates(sys);
    CHECK(k(0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(k(1) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("column scaling covariance") {
    auto rng = make_rng(31);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    DesignSystem sys;
    sys.X.resize(20, 3);
    sys.y.resize(20);
    for (long i = 0; i < 20; ++i) {
        for (long j = 0; j < 3; ++j) sys.X(i, j) = u(rng);
        sys.y(i) = u(rng);
    }
    const Eigen::VectorXd k = solve_rates(sys);
    const double sse = (sys.y - sys.X * k).squaredNorm();

    DesignSystem scaled = sys;
    const double c = 4.0;
    scaled.X.col(1) *= c;
    const Eigen::VectorXd k2 = solve_rates(scaled);
    CHECK(k2(1) == doctest::Approx(k(1) / c).epsilon(1e-9));
    CHECK((scaled.y - scaled.X * k2).squaredNorm() == doctest::Approx(sse).epsilon(1e-9));
}

TEST_CASE("true topology of case study 1 fits its noisy data without pruning") {
    const CaseStudy study = make_case_study(1);
    const auto data = simulate_dataset(study, 101);
    const auto smoothed = smooth_dataset(data, SmoothOptions{4, 10, 101});
    const RateFit fit = prune_and_fit(study.truth, smoothed);
    REQUIRE(fit.surviving_count() == 4);
    CHECK(fit.pruned_count == 0);
    const Eigen::VectorXd truth_k = study.truth.rate_vector();
    for (int j = 0; j < 4; ++j)
        CHECK(std::abs(fit.k(j) - truth_k(j)) / truth_k(j) < 0.2);
    CHECK(std::isfinite(fit.sse_d));
    const DesignSystem sys = build_design(study.truth, smoothed);
    CHECK(fit.sse_d <= sys.y.squaredNorm());
}

TEST_CASE("a network whose only reaction fits negatively collapses to the empty fit") {
    // x2 -> x1 against data generated by x1 -> x2: the lone coefficient comes
    // out negative and the rectified network is empty.
    const ReactionNetwork truth(2, {Reaction({{1, 1}}, {{2, 1}}, 0.5)});
    ExperimentSpec spec;
    spec.initial_concentrations = Eigen::Vector2d(1.0, 0.0);
    spec.t_start = 0;
    spec.t_end = 4;
    spec.sample_interval = 0.25;
    const auto smoothed = std::vector<SmoothedExperiment>{exact_smoothed(truth, spec)};
    const ReactionNetwork wrong(2, {Reaction({{2, 1}}, {{1, 1}})});
    const RateFit fit = prune_and_fit(wrong, smoothed);
    CHECK(fit.surviving_count() == 0);
    CHECK(std::isinf(fit.sse_d));
    CHECK(fit.pruned_count == 1);
}

TEST_CASE("a spurious orthogonal reaction is pruned without disturbing the rest") {
    // Data from x1 -> x2 on a window where [x3] stays zero: the x3 -> x4 rate
    // term is the zero column, orthogonal to everything.
    const ReactionNetwork truth(4, {Reaction({{1, 1}}, {{2, 1}}, 0.5)});
    ExperimentSpec spec;
    spec.initial_concentrations = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
    spec.t_start = 0;
    spec.t_end = 4;
    spec.sample_interval = 0.25;
    const auto smoothed = std::vector<SmoothedExperiment>{exact_smoothed(truth, spec)};

    const ReactionNetwork padded(
        4, {Reaction({{1, 1}}, {{2, 1}}), Reaction({{3, 1}}, {{4, 1}})});
    const RateFit fit = prune_and_fit(padded, smoothed);
    REQUIRE(fit.surviving_count() == 1);
    CHECK(fit.pruned_count == 1);
    CHECK(fit.network.reaction(0) == truth.reaction(0));
    CHECK(std::abs(fit.k(0) - 0.5) < 1e-6);
}

TEST_CASE("single-pass mode keeps first-solve coefficients") {
    const ReactionNetwork truth(4, {Reaction({{1, 1}}, {{2, 1}}, 0.5)});
    ExperimentSpec spec;
    spec.initial_concentrations = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
    spec.t_start = 0;
    spec.t_end = 4;
    spec.sample_interval = 0.25;
    const auto smoothed = std::vector<SmoothedExperiment>{exact_smoothed(truth, spec)};
    const ReactionNetwork padded(
        4, {Reaction({{1, 1}}, {{2, 1}}), Reaction({{3, 1}}, {{4, 1}})});
    RegressionOptions options;
    options.single_pass = true;
    const RateFit fit = prune_and_fit(padded, smoothed, options);
    CHECK(fit.surviving_count() == 1);
    CHECK(std::abs(fit.k(0) - 0.5) < 1e-6);
}

TEST_CASE("the pruning loop terminates within q rounds and sse_d <= y'y") {
    auto rng = make_rng(77);
    const CaseStudy study = make_case_study(1);
    const auto data = simulate_dataset(study, 55);
    const auto smoothed = smooth_dataset(data, SmoothOptions{4, 10, 55});
    const DesignSystem base = build_design(study.truth, smoothed);
    const double yty = base.y.squaredNorm();

    std::uniform_int_distribution<int> slot(0, 5);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<int> ints(30);
        for (auto& v : ints) v = slot(rng);
        const DecodedNetwork d = decode(ints, 5, 6);
        const RateFit fit = prune_and_fit(d.network, smoothed);
        CHECK(fit.pruned_count <= d.network.reaction_count());
        if (fit.surviving_count() > 0) {
            CHECK(fit.sse_d <= yty * (1 + 1e-9));
            for (long j = 0; j < fit.k.size(); ++j) CHECK(fit.k(j) > 0);
        } else {
            CHECK(std::isinf(fit.sse_d));
        }
    }
}
