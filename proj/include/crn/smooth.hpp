#pragma once

#include "crn/integrate.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace crn {

/// Fitted second-order rational polynomial
///   x(t) = (p1 t^2 + p2 t + p3) / (t^2 + p4 t + p5).
struct RationalPolyFit {
    Eigen::Matrix<double, 5, 1> p = Eigen::Matrix<double, 5, 1>::Zero();
    double fit_sse = 0.0;
    bool pole_free = false;  // denominator has no real root on the fitted span
};

class SmoothingFailure : public std::runtime_error {
public:
    explicit SmoothingFailure(int species, std::string what)
        : std::runtime_error(std::move(what)), species_(species) {}
    int species() const { return species_; }

private:
    int species_;
};

double eval_rational(const Eigen::Matrix<double, 5, 1>& p, double t);

/// Analytic derivative of the fitted curve. Throws if the denominator
/// magnitude falls below 1e-12 at t.
double eval_derivative(const RationalPolyFit& fit, double t);

struct SmoothOptions {
    int trim = 4;       // samples dropped at each end of every signal
    int restarts = 10;  // multi-start count for the nonlinear fit
    std::uint64_t seed = 0;
};

/// Multi-start damped Gauss-Newton fit of the rational polynomial to one
/// signal. Returns the lowest-SSE pole-free fit; throws SmoothingFailure when
/// no restart yields one. Deterministic for a given seed.
RationalPolyFit fit_rational_poly(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                                  int restarts = 10, std::uint64_t seed = 0);

/// Trimmed measured concentrations plus derivative estimates D_{i,n}.
struct SmoothedExperiment {
    Eigen::VectorXd times;          // kept sample times
    Eigen::MatrixXd concentrations; // measured values at kept times (noisy)
    Eigen::MatrixXd derivatives;    // analytic derivatives of the fits at kept times
    std::vector<RationalPolyFit> fits;

    int kept_count() const { return static_cast<int>(times.size()); }
    int species_count() const { return static_cast<int>(concentrations.cols()); }
};

/// Fits each species signal independently on the full grid, evaluates the
/// analytic derivative at the kept times, and drops `trim` samples at each
/// end where the estimates are unreliable.
SmoothedExperiment smooth_experiment(const ExperimentSeries& series,
                                     const SmoothOptions& options = {});

/// Smooths every experiment with per-experiment seeds derived from the master.
std::vector<SmoothedExperiment> smooth_dataset(const std::vector<ExperimentSeries>& series,
                                               const SmoothOptions& options = {});

}  // namespace crn
