#include "crn/selection.hpp"

#include "crn/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace crn {

SelectionResult select_model(const Population& final_population,
                             const std::vector<ExperimentSeries>& experiments,
                             const SelectConfig& config) {
    if (final_population.empty()) throw std::invalid_argument("empty population");
    if (experiments.empty()) throw std::invalid_argument("select_model requires experiments");

    // Deduplicate by the canonical rectified network; fits are deterministic
    // per network, so the first representative carries everything needed.
    std::map<std::string, const Individual*> distinct;
    for (const auto& ind : final_population)
        distinct.emplace(ind.eval->fit.network.canonical_key(), &ind);

    std::vector<CandidateReport> candidates(distinct.size());
    {
        std::vector<const Individual*> members;
        members.reserve(distinct.size());
        for (const auto& [key, ind] : distinct) members.push_back(ind);
        parallel_for(static_cast<int>(members.size()), 1, [&](int c) {
            const Individual& ind = *members[static_cast<size_t>(c)];
            CandidateReport report;
            report.network = ind.eval->fit.network;
            report.k = ind.eval->fit.k;
            report.score_d = ind.eval->score;
            report.verdict = ind.eval->verdict;
            const SicCResult scored =
                sic_c(report.network, experiments, report.verdict.alpha, config.integrator);
            report.score_c = scored.score;
            report.sse_c_per_experiment = scored.sse_per_experiment;
            candidates[static_cast<size_t>(c)] = std::move(report);
        });
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const CandidateReport& a, const CandidateReport& b) {
                  if (a.score_c.value != b.score_c.value) return a.score_c.value < b.score_c.value;
                  if (a.score_c.q != b.score_c.q) return a.score_c.q < b.score_c.q;
                  if (a.score_d.value != b.score_d.value) return a.score_d.value < b.score_d.value;
                  return a.network.canonical_key() < b.network.canonical_key();
              });

    SelectionResult result;
    result.no_solution = std::all_of(candidates.begin(), candidates.end(),
                                     [](const CandidateReport& c) { return std::isinf(c.score_c.value); });
    const size_t keep = std::min<size_t>(candidates.size(), static_cast<size_t>(config.top_k));
    result.candidates.assign(candidates.begin(), candidates.begin() + static_cast<long>(keep));
    for (size_t i = 0; i < result.candidates.size(); ++i)
        result.candidates[i].rank = static_cast<int>(i) + 1;
    return result;
}

TopologyMatch compare_topology(const ReactionNetwork& found, const ReactionNetwork& truth) {
    if (found.species_count() != truth.species_count())
        throw std::invalid_argument("compare_topology requires matching species counts");

    auto sorted = [](const ReactionNetwork& n) {
        std::vector<Reaction> v = n.reactions();
        std::sort(v.begin(), v.end());
        return v;
    };
    const std::vector<Reaction> f = sorted(found);
    const std::vector<Reaction> t = sorted(truth);

    TopologyMatch match;
    std::set_difference(t.begin(), t.end(), f.begin(), f.end(), std::back_inserter(match.missing));
    std::set_difference(f.begin(), f.end(), t.begin(), t.end(), std::back_inserter(match.extra));
    match.match = match.missing.empty() && match.extra.empty();
    return match;
}

}  // namespace crn
