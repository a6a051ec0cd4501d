#pragma once

#include "crn/integrate.hpp"
#include "crn/regression.hpp"

#include <vector>

namespace crn {

/// Penalized Schwarz information criterion value
///   value = n_s ln(sse / n_s) + (q + 1 + alpha) ln(n_s),
/// or +infinity when sse is infinite.
struct Score {
    double sse = 0.0;
    long n_s = 0;
    int q = 0;
    int alpha = 0;
    double value = 0.0;
};

Score sic_from_sse(double sse, long n_s, int q, int alpha);

/// Derivative-space criterion (the DE objective). n_s is the total stacked row
/// count of the design system.
Score sic_d(const RateFit& fit, long n_s, int alpha);

struct SicCResult {
    Score score;
    std::vector<double> sse_per_experiment;  // +infinity for failed integrations
};

/// Concentration-space criterion used for model selection: integrates the
/// fitted network from the first measured sample of each experiment and sums
/// squared prediction errors over every sampled point. Any integration failure
/// makes the value +infinity.
SicCResult sic_c(const ReactionNetwork& fitted_network,
                 const std::vector<ExperimentSeries>& experiments, int alpha,
                 const IntegratorOptions& options = {});

}  // namespace crn
