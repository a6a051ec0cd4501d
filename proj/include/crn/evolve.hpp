#pragma once

#include "crn/genome.hpp"
#include "crn/regression.hpp"
#include "crn/scoring.hpp"
#include "crn/validity.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

namespace crn {

struct DEConfig {
    int population_size = 400;  // P
    int max_generations = 2000; // G
    int stagnation_limit = 500; // stop after this many generations without a new best
    int q_max = 10;
    double tau1 = 0.1;          // F mutation probability
    double tau2 = 0.1;          // CR mutation probability
    double F_l = 0.1;
    double F_u = 0.9;
    std::uint64_t seed = 0;
    bool forced_crossover_index = true;  // canonical DE/rand/1/bin donor guarantee
    int threads = 1;
};

/// Everything derived from one rounded genome: the rectified fit, the validity
/// verdict of the rectified network, and the SIC_D score.
struct NetworkEvaluation {
    RateFit fit;
    ValidityVerdict verdict;
    Score score;
};

class ObjectiveFn {
public:
    virtual ~ObjectiveFn() = default;
    virtual std::shared_ptr<const NetworkEvaluation> evaluate(const std::vector<int>& ints) const = 0;
};

/// The SIC_D pipeline round -> decode -> prune_and_fit -> assess, memoized by
/// the canonical rectified-input network (many genomes decode to the same
/// network). Thread safe; pure, so caching never changes results.
class DerivativeObjective : public ObjectiveFn {
public:
    DerivativeObjective(std::vector<SmoothedExperiment> smoothed,
                        std::optional<ConservationMatrix> conservation, int species_count,
                        int q_max, RegressionOptions regression = {},
                        std::size_t cache_capacity = 1u << 19);

    std::shared_ptr<const NetworkEvaluation> evaluate(const std::vector<int>& ints) const override;

    long n_s() const { return n_s_; }
    int species_count() const { return species_count_; }
    int q_max() const { return q_max_; }
    const std::vector<SmoothedExperiment>& smoothed() const { return smoothed_; }
    const std::optional<ConservationMatrix>& conservation() const { return conservation_; }

private:
    std::vector<SmoothedExperiment> smoothed_;
    std::optional<ConservationMatrix> conservation_;
    int species_count_;
    int q_max_;
    RegressionOptions regression_;
    long n_s_;
    std::size_t cache_capacity_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, std::shared_ptr<const NetworkEvaluation>> cache_;
};

struct Individual {
    Genome genome;
    double F = 0.5;
    double CR = 0.5;
    std::shared_ptr<const NetworkEvaluation> eval;

    double objective_value() const { return eval->score.value; }
};

using Population = std::vector<Individual>;

struct GenerationStats {
    int generation = 0;
    double best_sic_d = 0.0;
    int best_q = 0;
    double valid_fraction = 0.0;
    double mean_F = 0.0;
    double mean_CR = 0.0;
};

GenerationStats summarize(int generation, const Population& population);

/// Uniform random population; F in [0.1, 1], CR in [0, 1]. Every individual's
/// stream is derived from (seed, 0, index), so the result is reproducible and
/// independent of evaluation order.
Population initialize(const DEConfig& config, const ObjectiveFn& objective, int species_count);

/// jDE control-parameter mutation (draws a1..a4 in fixed order).
std::pair<double, double> mutate_control(double F, double CR, std::mt19937_64& rng,
                                         const DEConfig& config);

/// DE/rand/1/bin offspring for individual i: donor z_a1 + F (z_a2 - z_a3) with
/// binomial crossover at rate CR plus one forced donor index (unless disabled),
/// out-of-bounds elements truncated to the violated bound.
Genome make_offspring(int i, const Population& population, double F, double CR,
                      std::mt19937_64& rng, const DEConfig& config);

/// One generation: every parent competes with its offspring; ties go to the
/// offspring, which also inherits the mutated control parameters.
Population step_de(const Population& population, int generation, const DEConfig& config,
                   const ObjectiveFn& objective);

struct RunResult {
    Population population;
    std::vector<GenerationStats> history;  // entry 0 is the initial population
    int generations_completed = 0;
    bool stagnated = false;
};

using CheckpointFn = std::function<void(int generation, const Population&)>;

/// Full DE run with early stop once the best objective value has not changed
/// for `stagnation_limit` consecutive generations.
RunResult run_de(const DEConfig& config, const ObjectiveFn& objective, int species_count,
                 const CheckpointFn& checkpoint = nullptr, int checkpoint_every = 0);

}  // namespace crn
