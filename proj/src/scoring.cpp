#include "crn/scoring.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crn {

Score sic_from_sse(double sse, long n_s, int q, int alpha) {
    if (n_s < 1) throw std::invalid_argument("sample size must be >= 1");
    if (sse < 0) throw std::invalid_argument("sse must be >= 0");
    Score score{sse, n_s, q, alpha, 0.0};
    if (std::isinf(sse)) {
        score.value = std::numeric_limits<double>::infinity();
        return score;
    }
    const double n = static_cast<double>(n_s);
    score.value = n * std::log(sse / n) + (q + 1 + alpha) * std::log(n);
    return score;
}

Score sic_d(const RateFit& fit, long n_s, int alpha) {
    return sic_from_sse(fit.sse_d, n_s, fit.surviving_count(), alpha);
}

SicCResult sic_c(const ReactionNetwork& fitted_network,
                 const std::vector<ExperimentSeries>& experiments, int alpha,
                 const IntegratorOptions& options) {
    if (experiments.empty()) throw std::invalid_argument("sic_c requires experiments");

    SicCResult result;
    result.sse_per_experiment.reserve(experiments.size());
    double sse = 0.0;
    long n_s = 0;
    bool failed = false;
    for (const auto& e : experiments) {
        n_s += static_cast<long>(e.sample_count()) * e.species_count();
        const Eigen::VectorXd x0 = e.measured.row(0).transpose();
        const TryIntegrateResult r = try_integrate(fitted_network, x0, e.times, options);
        if (r.status != OdeStatus::ok) {
            result.sse_per_experiment.push_back(std::numeric_limits<double>::infinity());
            failed = true;
            continue;
        }
        const double e_sse = (e.measured - r.samples).squaredNorm();
        result.sse_per_experiment.push_back(e_sse);
        sse += e_sse;
    }
    if (failed) sse = std::numeric_limits<double>::infinity();
    result.score = sic_from_sse(sse, n_s, fitted_network.reaction_count(), alpha);
    return result;
}

}  // namespace crn
