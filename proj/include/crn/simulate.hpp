#pragma once

#include "crn/integrate.hpp"
#include "crn/network.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace crn {

/// A benchmark system: the generating network with its true rate coefficients,
/// the batch experiment designs, and (when chemical information is assumed
/// known) the conservation matrix.
struct CaseStudy {
    ReactionNetwork truth = ReactionNetwork(1);
    std::vector<ExperimentSpec> experiments;
    std::optional<ConservationMatrix> conservation;
    double noise_fraction = 0.04;
};

/// The three benchmark networks. Throws on any other id.
CaseStudy make_case_study(int id);

/// Adds independent Gaussian noise to each species signal; the standard
/// deviation is `fraction` times the range of the noise-free signal. Noise
/// streams are derived from (seed, experiment_index, species), so experiments
/// can be generated concurrently and reproducibly. Values are not clamped at
/// zero; downstream code must tolerate small negative measurements.
ExperimentSeries add_noise(const ExperimentSeries& series, double fraction, std::uint64_t seed,
                           int experiment_index);

/// Integrates every experiment of the case study and corrupts the samples.
std::vector<ExperimentSeries> simulate_dataset(const CaseStudy& study, std::uint64_t seed,
                                               const IntegratorOptions& options = {});

}  // namespace crn
