#pragma once

#include "crn/network.hpp"
#include "crn/smooth.hpp"

#include <Eigen/Dense>

#include <vector>

namespace crn {

/// Stacked linear system y = X k relating trial-network rate coefficients to
/// derivative estimates. Rows are ordered (experiment, species, time) with
/// experiments outermost.
struct DesignSystem {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    long row_count() const { return X.rows(); }
};

DesignSystem build_design(const ReactionNetwork& network,
                          const std::vector<SmoothedExperiment>& smoothed);

/// Minimum-norm least squares via SVD; singular values below 1e-10 times the
/// largest are treated as zero.
Eigen::VectorXd solve_rates(const DesignSystem& system);

/// A trial network after pruning, with its fitted coefficients.
struct RateFit {
    ReactionNetwork network = ReactionNetwork(1);  // rectified; every reaction carries its fitted k
    Eigen::VectorXd k;         // strictly positive, one per surviving reaction
    double sse_d = 0.0;        // +infinity iff no reactions survive
    int pruned_count = 0;

    int surviving_count() const { return network.reaction_count(); }
};

struct RegressionOptions {
    bool single_pass = false;        // paper-literal: no re-fit after deletion
    double prune_threshold = 1e-12;  // coefficients at or below this count as non-positive
};

/// Fits rate coefficients, deletes reactions whose coefficient is non-positive
/// and repeats until all survive (or none do). In single-pass mode the
/// surviving coefficients are kept from the first solve without re-fitting.
RateFit prune_and_fit(const ReactionNetwork& network,
                      const std::vector<SmoothedExperiment>& smoothed,
                      const RegressionOptions& options = {});

/// Total stacked row count over the smoothed experiments (the N_s of the
/// derivative-space criterion).
long stacked_sample_count(const std::vector<SmoothedExperiment>& smoothed);

}  // namespace crn
