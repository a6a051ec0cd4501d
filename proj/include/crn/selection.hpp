#pragma once

#include "crn/evolve.hpp"
#include "crn/integrate.hpp"
#include "crn/scoring.hpp"

#include <vector>

namespace crn {

/// One distinct candidate network of the final population, re-scored in
/// concentration space.
struct CandidateReport {
    int rank = 0;
    ReactionNetwork network;   // rectified, with fitted rate coefficients
    Eigen::VectorXd k;
    Score score_d;             // derivative-space criterion from the DE
    Score score_c;             // concentration-space criterion
    ValidityVerdict verdict;
    std::vector<double> sse_c_per_experiment;

    CandidateReport() : network(1) {}
};

struct SelectionResult {
    std::vector<CandidateReport> candidates;  // ascending by SIC_C, top K
    bool no_solution = false;                 // every candidate failed to integrate
};

struct SelectConfig {
    int top_k = 10;
    IntegratorOptions integrator;
};

/// Deduplicates the final population by canonical rectified network, computes
/// SIC_C per distinct candidate (reusing the regression coefficients and the
/// validity penalty), and ranks ascending by SIC_C. Ties break by smaller q,
/// then lower SIC_D, then the canonical form.
SelectionResult select_model(const Population& final_population,
                             const std::vector<ExperimentSeries>& experiments,
                             const SelectConfig& config = {});

struct TopologyMatch {
    bool match = false;
    std::vector<Reaction> missing;  // in truth but not found
    std::vector<Reaction> extra;    // found but not in truth
};

/// Structural comparison of canonical reaction multisets; order and rate
/// coefficients are ignored.
TopologyMatch compare_topology(const ReactionNetwork& found, const ReactionNetwork& truth);

}  // namespace crn
