#include "crn/simulate.hpp"
#include "crn/smooth.hpp"

#include <doctest.h>

#include <cmath>

using namespace crn;

namespace {

Eigen::VectorXd linspace(double lo, double hi, int n) { return Eigen::VectorXd::LinSpaced(n, lo, hi); }

}  // namespace

TEST_CASE("recovers a known rational polynomial exactly") {
    const Eigen::VectorXd t = linspace(0, 10, 21);
    Eigen::Matrix<double, 5, 1> truth;
    truth << 2, 1, 3, 1, 2;
    Eigen::VectorXd v(t.size());
    for (long i = 0; i < t.size(); ++i) v(i) = eval_rational(truth, t(i));

    const RationalPolyFit fit = fit_rational_poly(t, v, 10, 3);
    CHECK(fit.fit_sse < 1e-10);
    CHECK(fit.pole_free);
    for (int d = 0; d < 5; ++d) CHECK(fit.p(d) == doctest::Approx(truth(d)).epsilon(1e-4));
}

TEST_CASE("constant signals are fitted exactly with zero derivative") {
    const Eigen::VectorXd t = linspace(0, 8, 15);
    const Eigen::VectorXd v = Eigen::VectorXd::Constant(15, 0.7);
    const RationalPolyFit fit = fit_rational_poly(t, v, 10, 0);
    CHECK(fit.fit_sse < 1e-16);
    for (double tv : {0.0, 2.0, 7.5}) {
        CHECK(eval_rational(fit.p, tv) == doctest::Approx(0.7).epsilon(1e-7));
        CHECK(std::abs(eval_derivative(fit, tv)) < 1e-7);
    }
}

TEST_CASE("eval_derivative matches the hand-evaluated formula") {
    RationalPolyFit fit;
    fit.p << 2, 1, 3, 1, 2;
    fit.pole_free = true;
    CHECK(eval_derivative(fit, 0.0) == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("eval_derivative matches central differences of the fitted curve") {
    RationalPolyFit fit;
    fit.p << 1.3, -0.4, 2.0, 0.9, 5.0;
    fit.pole_free = true;
    const double h = 1e-5;
    for (double t : {0.0, 0.7, 1.9, 4.2, 9.8}) {
        const double fd = (eval_rational(fit.p, t + h) - eval_rational(fit.p, t - h)) / (2 * h);
        const double an = eval_derivative(fit, t);
        CHECK(std::abs(fd - an) / std::max(1e-6, std::abs(an)) < 1e-6);
    }
}

TEST_CASE("eval_derivative rejects a vanishing denominator") {
    RationalPolyFit fit;
    fit.p << 1, 0, 1, 0, 0;  // denominator t^2
    CHECK_THROWS_AS(eval_derivative(fit, 0.0), std::domain_error);
}

TEST_CASE("trimming keeps N - 8 interior samples") {
    const ReactionNetwork net(2, {Reaction({{1, 1}}, {{2, 1}}, 0.1)});
    ExperimentSpec spec;
    spec.initial_concentrations = Eigen::Vector2d(1.0, 0.0);
    spec.t_start = 0;
    spec.t_end = 24;
    spec.sample_interval = 1;
    const ExperimentSeries s25 = integrate(net, spec);
    const SmoothedExperiment sm25 = smooth_experiment(s25);
    CHECK(sm25.kept_count() == 17);
    CHECK(sm25.times(0) == doctest::Approx(4.0));
    CHECK(sm25.times(16) == doctest::Approx(20.0));

    spec.t_end = 15;
    spec.sample_interval = 0.5;
    const SmoothedExperiment sm31 = smooth_experiment(integrate(net, spec));
    CHECK(sm31.kept_count() == 23);

    ExperimentSeries tiny;
    tiny.times = Eigen::VectorXd::LinSpaced(13, 0, 12);
    tiny.measured = Eigen::MatrixXd::Zero(13, 1);
    CHECK_THROWS_AS(smooth_experiment(tiny), std::invalid_argument);
}

TEST_CASE("noise-free exponential decay yields accurate derivatives") {
    const ReactionNetwork net(2, {Reaction({{1, 1}}, {{2, 1}}, 0.5)});
    ExperimentSpec spec;
    spec.initial_concentrations = Eigen::Vector2d(1.0, 0.0);
    spec.t_start = 0;
    spec.t_end = 4;
    spec.sample_interval = 0.25;
    const ExperimentSeries series = integrate(net, spec);
    const SmoothedExperiment smoothed = smooth_experiment(series);
    REQUIRE(smoothed.kept_count() == 9);
    for (int n = 0; n < smoothed.kept_count(); ++n) {
        const double t = smoothed.times(n);
        CHECK(std::abs(smoothed.derivatives(n, 0) + 0.5 * std::exp(-0.5 * t)) < 1e-3);
        CHECK(std::abs(smoothed.derivatives(n, 1) - 0.5 * std::exp(-0.5 * t)) < 1e-3);
    }
    // Concentrations are passed through unchanged at kept times.
    CHECK(smoothed.concentrations == series.measured.block(4, 0, 9, 2));
}

TEST_CASE("fits are deterministic and species-independent") {
    const CaseStudy study = make_case_study(1);
    const auto data = simulate_dataset(study, 5);
    SmoothOptions options;
    options.seed = 17;
    const SmoothedExperiment a = smooth_experiment(data[1], options);
    const SmoothedExperiment b = smooth_experiment(data[1], options);
    CHECK(a.derivatives == b.derivatives);

    // Corrupting species 5 must leave species 3's fit untouched.
    ExperimentSeries tweaked = data[1];
    tweaked.measured.col(4).array() += 10.0;
    const SmoothedExperiment c = smooth_experiment(tweaked, options);
    CHECK(c.fits[2].p == a.fits[2].p);
    CHECK(c.fits[4].p != a.fits[4].p);
}

TEST_CASE("noisy benchmark signal is fitted to within the noise level") {
    const CaseStudy study = make_case_study(1);
    const auto data = simulate_dataset(study, 11);
    const ExperimentSeries& expt2 = data[1];
    const SmoothedExperiment smoothed = smooth_experiment(expt2, SmoothOptions{4, 10, 23});

    // x3's noise sigma is 4% of its range; the per-point fit SSE should stay
    // below (2 sigma)^2.
    const int species = 2;
    const double range =
        expt2.truth->col(species).maxCoeff() - expt2.truth->col(species).minCoeff();
    const double sigma = 0.04 * range;
    const RationalPolyFit& fit = smoothed.fits[species];
    const double per_point = fit.fit_sse / static_cast<double>(expt2.sample_count());
    CHECK(per_point < (2 * sigma) * (2 * sigma));
}
