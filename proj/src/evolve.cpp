#include "crn/evolve.hpp"

#include "crn/parallel.hpp"
#include "crn/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace crn {

namespace {
constexpr std::uint64_t kSaltInit = 0xde01;
constexpr std::uint64_t kSaltStep = 0xde02;
}  // namespace

DerivativeObjective::DerivativeObjective(std::vector<SmoothedExperiment> smoothed,
                                         std::optional<ConservationMatrix> conservation,
                                         int species_count, int q_max,
                                         RegressionOptions regression, std::size_t cache_capacity)
    : smoothed_(std::move(smoothed)),
      conservation_(std::move(conservation)),
      species_count_(species_count),
      q_max_(q_max),
      regression_(regression),
      n_s_(stacked_sample_count(smoothed_)),
      cache_capacity_(cache_capacity) {
    if (smoothed_.empty()) throw std::invalid_argument("objective requires smoothed experiments");
    for (const auto& e : smoothed_)
        if (e.species_count() != species_count_)
            throw std::invalid_argument("smoothed experiment species count mismatch");
    if (conservation_ && conservation_->species_count() != species_count_)
        throw std::invalid_argument("conservation matrix species count mismatch");
}

std::shared_ptr<const NetworkEvaluation> DerivativeObjective::evaluate(
    const std::vector<int>& ints) const {
    const DecodedNetwork decoded = decode(ints, species_count_, q_max_);
    const std::string key = decoded.network.canonical_key();
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    NetworkEvaluation ev;
    ev.fit = prune_and_fit(decoded.network, smoothed_, regression_);
    ev.verdict = assess(ev.fit.network, conservation_, q_max_);
    ev.score = sic_d(ev.fit, n_s_, ev.verdict.alpha);
    auto shared = std::make_shared<const NetworkEvaluation>(std::move(ev));
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (cache_.size() < cache_capacity_) {
            auto [it, inserted] = cache_.emplace(key, shared);
            return it->second;  // if another thread won the race, reuse its value
        }
    }
    return shared;
}

GenerationStats summarize(int generation, const Population& population) {
    GenerationStats stats;
    stats.generation = generation;
    const auto best = std::min_element(
        population.begin(), population.end(), [](const Individual& a, const Individual& b) {
            return a.objective_value() < b.objective_value();
        });
    stats.best_sic_d = best->objective_value();
    stats.best_q = best->eval->fit.surviving_count();
    double valid = 0, f_sum = 0, cr_sum = 0;
    for (const auto& ind : population) {
        if (ind.eval->verdict.valid) valid += 1;
        f_sum += ind.F;
        cr_sum += ind.CR;
    }
    const double p = static_cast<double>(population.size());
    stats.valid_fraction = valid / p;
    stats.mean_F = f_sum / p;
    stats.mean_CR = cr_sum / p;
    return stats;
}

Population initialize(const DEConfig& config, const ObjectiveFn& objective, int species_count) {
    if (config.population_size < 4)
        throw std::invalid_argument("population size must be >= 4 (mutation needs 3 distinct others)");
    const GenomeBounds bounds = genome_bounds(species_count, config.q_max);
    const int n = kSlotsPerReaction * config.q_max;

    Population population;
    population.reserve(static_cast<size_t>(config.population_size));
    for (int i = 0; i < config.population_size; ++i) {
        auto rng = make_rng(config.seed, kSaltInit, static_cast<std::uint64_t>(i));
        std::uniform_real_distribution<double> in_bounds(bounds.lo, bounds.hi);
        Eigen::VectorXd values(n);
        for (int j = 0; j < n; ++j) values(j) = in_bounds(rng);
        Individual ind;
        ind.genome = make_genome(std::move(values), species_count, config.q_max);
        ind.F = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
        ind.CR = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        population.push_back(std::move(ind));
    }
    parallel_for(config.population_size, config.threads, [&](int i) {
        population[static_cast<size_t>(i)].eval =
            objective.evaluate(round_genome(population[static_cast<size_t>(i)].genome));
    });
    return population;
}

std::pair<double, double> mutate_control(double F, double CR, std::mt19937_64& rng,
                                         const DEConfig& config) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double a1 = unit(rng);
    const double a2 = unit(rng);
    const double a3 = unit(rng);
    const double a4 = unit(rng);
    const double f_new = a2 < config.tau1 ? config.F_l + a1 * config.F_u : F;
    const double cr_new = a4 < config.tau2 ? a3 : CR;
    return {f_new, cr_new};
}

Genome make_offspring(int i, const Population& population, double F, double CR,
                      std::mt19937_64& rng, const DEConfig& config) {
    const int p = static_cast<int>(population.size());
    if (p < 4) throw std::invalid_argument("make_offspring requires population size >= 4");
    std::uniform_int_distribution<int> pick(0, p - 1);
    int a1 = i, a2 = i, a3 = i;
    while (a1 == i) a1 = pick(rng);
    while (a2 == i || a2 == a1) a2 = pick(rng);
    while (a3 == i || a3 == a1 || a3 == a2) a3 = pick(rng);

    const Genome& parent = population[static_cast<size_t>(i)].genome;
    const int n = parent.length();
    const Eigen::VectorXd donor =
        population[static_cast<size_t>(a1)].genome.values +
        F * (population[static_cast<size_t>(a2)].genome.values -
             population[static_cast<size_t>(a3)].genome.values);

    int forced = -1;
    if (config.forced_crossover_index) forced = std::uniform_int_distribution<int>(0, n - 1)(rng);

    const GenomeBounds bounds = genome_bounds(parent.species_count, parent.q_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd child(n);
    for (int j = 0; j < n; ++j) {
        const double draw = unit(rng);  // always consumed, independent of the forced index
        const bool from_donor = draw < CR || j == forced;
        child(j) = from_donor ? std::clamp(donor(j), bounds.lo, bounds.hi) : parent.values(j);
    }
    return make_genome(std::move(child), parent.species_count, parent.q_max);
}

Population step_de(const Population& population, int generation, const DEConfig& config,
                   const ObjectiveFn& objective) {
    const int p = static_cast<int>(population.size());
    std::vector<Genome> offspring;
    offspring.reserve(static_cast<size_t>(p));
    std::vector<std::pair<double, double>> controls(static_cast<size_t>(p));

    for (int i = 0; i < p; ++i) {
        auto rng = make_rng(config.seed, kSaltStep, static_cast<std::uint64_t>(generation),
                            static_cast<std::uint64_t>(i));
        const auto& parent = population[static_cast<size_t>(i)];
        controls[static_cast<size_t>(i)] = mutate_control(parent.F, parent.CR, rng, config);
        offspring.push_back(make_offspring(i, population, controls[static_cast<size_t>(i)].first,
                                           controls[static_cast<size_t>(i)].second, rng, config));
    }

    std::vector<std::shared_ptr<const NetworkEvaluation>> evals(static_cast<size_t>(p));
    parallel_for(p, config.threads, [&](int i) {
        evals[static_cast<size_t>(i)] = objective.evaluate(round_genome(offspring[static_cast<size_t>(i)]));
    });

    Population next;
    next.reserve(static_cast<size_t>(p));
    for (int i = 0; i < p; ++i) {
        const auto& parent = population[static_cast<size_t>(i)];
        if (evals[static_cast<size_t>(i)]->score.value <= parent.objective_value()) {
            Individual child;
            child.genome = std::move(offspring[static_cast<size_t>(i)]);
            child.F = controls[static_cast<size_t>(i)].first;
            child.CR = controls[static_cast<size_t>(i)].second;
            child.eval = std::move(evals[static_cast<size_t>(i)]);
            next.push_back(std::move(child));
        } else {
            next.push_back(parent);
        }
    }
    return next;
}

RunResult run_de(const DEConfig& config, const ObjectiveFn& objective, int species_count,
                 const CheckpointFn& checkpoint, int checkpoint_every) {
    RunResult result;
    result.population = initialize(config, objective, species_count);
    result.history.push_back(summarize(0, result.population));

    double best = result.history.back().best_sic_d;
    int last_change = 0;

    for (int g = 1; g <= config.max_generations; ++g) {
        result.population = step_de(result.population, g, config, objective);
        result.history.push_back(summarize(g, result.population));
        result.generations_completed = g;

        const double current = result.history.back().best_sic_d;
        if (current != best) {
            best = current;
            last_change = g;
        }
        if (checkpoint && checkpoint_every > 0 && g % checkpoint_every == 0)
            checkpoint(g, result.population);
        if (g - last_change >= config.stagnation_limit) {
            result.stagnated = true;
            break;
        }
    }
    return result;
}

}  // namespace crn
