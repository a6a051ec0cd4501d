#include "crn/simulate.hpp"

#include "crn/rng.hpp"

#include <stdexcept>

namespace crn {

namespace {

ExperimentSpec batch(std::vector<double> x0, double t_end, double interval) {
    ExperimentSpec spec;
    spec.initial_concentrations =
        Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<long>(x0.size()));
    spec.t_start = 0.0;
    spec.t_end = t_end;
    spec.sample_interval = interval;
    return spec;
}

Reaction rxn(std::vector<SpeciesTerm> reactants, std::vector<SpeciesTerm> products, double k) {
    return Reaction(std::move(reactants), std::move(products), k);
}

std::vector<double> padded(std::initializer_list<double> head, int total) {
    std::vector<double> x(static_cast<size_t>(total), 0.0);
    size_t i = 0;
    for (double v : head) x[i++] = v;
    return x;
}

}  // namespace

CaseStudy make_case_study(int id) {
    CaseStudy study;
    switch (id) {
        case 1: {
            // Five species, four reactions; only x1 and x2 are present initially.
            study.truth = ReactionNetwork(5, {
                                                 rxn({{1, 1}, {2, 1}}, {{3, 1}}, 0.1),
                                                 rxn({{3, 1}}, {{4, 1}}, 0.2),
                                                 rxn({{3, 1}}, {{5, 1}}, 0.13),
                                                 rxn({{4, 1}}, {{5, 1}}, 0.3),
                                             });
            study.experiments = {
                batch(padded({0.33, 1.0}, 5), 24.0, 1.0),
                batch(padded({1.0, 0.33}, 5), 24.0, 1.0),
                batch(padded({1.0, 1.0}, 5), 24.0, 1.0),
                batch(padded({0.75, 1.0}, 5), 24.0, 1.0),
            };
            break;
        }
        case 2: {
            // Six species; the fourth reaction is the reverse of the third.
            study.truth = ReactionNetwork(6, {
                                                 rxn({{1, 1}, {2, 1}}, {{3, 1}}, 0.2),
                                                 rxn({{3, 1}}, {{4, 1}, {5, 1}}, 0.1),
                                                 rxn({{5, 1}}, {{6, 1}}, 0.15),
                                                 rxn({{6, 1}}, {{5, 1}}, 0.05),
                                             });
            study.experiments = {
                batch(padded({2.5, 2.5}, 6), 15.0, 0.5),
                batch(padded({2.5, 7.5}, 6), 15.0, 0.5),
                batch(padded({7.5, 2.5}, 6), 15.0, 0.5),
                batch(padded({10.0, 5.0}, 6), 15.0, 0.5),
            };
            break;
        }
        case 3: {
            // Ten species with a backbone of unimolecular reactions in series
            // (x3 -> x4 -> x5 -> x6) whose rate coefficients are similar in
            // magnitude, plus two decomposition branches.
            study.truth = ReactionNetwork(10, {
                                                  rxn({{1, 1}, {2, 1}}, {{3, 1}}, 0.35),
                                                  rxn({{3, 1}}, {{4, 1}}, 0.25),
                                                  rxn({{4, 1}}, {{5, 1}}, 0.3),
                                                  rxn({{5, 1}}, {{6, 1}}, 0.4),
                                                  rxn({{6, 1}}, {{7, 1}, {8, 1}}, 0.3),
                                                  rxn({{4, 1}}, {{9, 1}, {10, 1}}, 0.1),
                                              });
            study.experiments = {
                batch(padded({5.0, 5.0}, 10), 5.0, 0.1),
                batch(padded({2.0, 4.0}, 10), 5.0, 0.1),
                batch(padded({4.0, 2.0}, 10), 5.0, 0.1),
            };
            // Molecular-weight ratios of the ten species.
            Eigen::MatrixXd a(1, 10);
            a << 1, 3, 4, 4, 4, 4, 1, 3, 2, 2;
            study.conservation = ConservationMatrix(a);
            break;
        }
        default:
            throw std::invalid_argument("unknown case study id (expected 1, 2 or 3)");
    }
    return study;
}

ExperimentSeries add_noise(const ExperimentSeries& series, double fraction, std::uint64_t seed,
                           int experiment_index) {
    if (!series.truth) throw std::invalid_argument("add_noise requires a noise-free truth");
    if (fraction < 0) throw std::invalid_argument("noise fraction must be >= 0");
    const Eigen::MatrixXd& truth = *series.truth;
    ExperimentSeries noisy = series;
    noisy.measured = truth;
    for (int s = 0; s < truth.cols(); ++s) {
        const double range = truth.col(s).maxCoeff() - truth.col(s).minCoeff();
        const double sigma = fraction * range;
        if (sigma == 0.0) continue;
        auto rng = make_rng(seed, 0x6e6f697365ULL, static_cast<std::uint64_t>(experiment_index),
                            static_cast<std::uint64_t>(s));
        std::normal_distribution<double> gauss(0.0, sigma);
        for (int n = 0; n < truth.rows(); ++n) noisy.measured(n, s) = truth(n, s) + gauss(rng);
    }
    return noisy;
}

std::vector<ExperimentSeries> simulate_dataset(const CaseStudy& study, std::uint64_t seed,
                                               const IntegratorOptions& options) {
    std::vector<ExperimentSeries> out;
    out.reserve(study.experiments.size());
    for (size_t m = 0; m < study.experiments.size(); ++m) {
        ExperimentSeries truth = integrate(study.truth, study.experiments[m], options);
        out.push_back(add_noise(truth, study.noise_fraction, seed, static_cast<int>(m)));
    }
    return out;
}

}  // namespace crn
