#pragma once

#include "crn/network.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>

namespace crn {

/// One batch experiment design: initial concentrations and a uniform sampling
/// grid from t_start to t_end inclusive.
struct ExperimentSpec {
    Eigen::VectorXd initial_concentrations;
    double t_start = 0.0;
    double t_end = 0.0;
    double sample_interval = 0.0;

    int sample_count() const;
    Eigen::VectorXd sample_times() const;
};

/// Sampled concentrations of one experiment. `truth` carries the noise-free
/// trajectory when the data came from a simulation.
struct ExperimentSeries {
    Eigen::VectorXd times;
    Eigen::MatrixXd measured;               // sample_count x S
    std::optional<Eigen::MatrixXd> truth;   // same shape

    int sample_count() const { return static_cast<int>(times.size()); }
    int species_count() const { return static_cast<int>(measured.cols()); }
};

struct IntegratorOptions {
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    double max_state = 1e12;       // beyond this magnitude the trajectory counts as diverged
    long max_steps = 2'000'000;
};

enum class OdeStatus { ok, step_underflow, nonfinite, diverged };

struct OdeResult {
    OdeStatus status = OdeStatus::ok;
    double last_valid_time = 0.0;
    Eigen::MatrixXd samples;  // rows filled up to the last sample reached
};

class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(OdeStatus status, double last_valid_time);
    OdeStatus status() const { return status_; }
    double last_valid_time() const { return last_valid_time_; }

private:
    OdeStatus status_;
    double last_valid_time_;
};

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt)>;

/// Dormand-Prince 5(4) adaptive integrator with the standard fourth-order
/// continuous extension; samples the solution at `times` (strictly increasing,
/// times[0] is the initial time) without constraining the step sequence.
OdeResult integrate_ode(const OdeRhs& rhs, const Eigen::VectorXd& x0,
                        const Eigen::VectorXd& times, const IntegratorOptions& options = {});

/// Solves dx/dt = N r for the network from the experiment's initial conditions
/// and samples on its grid. Throws IntegrationFailure on solver breakdown.
ExperimentSeries integrate(const ReactionNetwork& network, const ExperimentSpec& spec,
                           const IntegratorOptions& options = {});

/// Non-throwing variant used when failures are an expected outcome (candidate
/// scoring); the series is meaningful only when status == ok.
struct TryIntegrateResult {
    OdeStatus status = OdeStatus::ok;
    double last_valid_time = 0.0;
    Eigen::MatrixXd samples;
};
TryIntegrateResult try_integrate(const ReactionNetwork& network, const Eigen::VectorXd& x0,
                                 const Eigen::VectorXd& times, const IntegratorOptions& options = {});

}  // namespace crn
