#include "crn/cli.hpp"

#include "crn/rng.hpp"
#include "crn/validity.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace crn {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kSaltSmooth = 0x736d6f;

ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    j["manifest"] = c.manifest_path;
    j["out_dir"] = c.out_dir;
    j["q_max"] = c.q_max;
    j["population"] = c.population;
    j["generations"] = c.generations;
    j["stagnation"] = c.stagnation;
    j["tau1"] = c.tau1;
    j["tau2"] = c.tau2;
    j["F_l"] = c.F_l;
    j["F_u"] = c.F_u;
    j["trim"] = c.trim;
    j["restarts"] = c.restarts;
    j["rel_tol"] = c.rel_tol;
    j["abs_tol"] = c.abs_tol;
    j["seed"] = c.seed;
    j["runs"] = c.runs;
    j["use_conservation"] = c.use_conservation;
    j["single_pass"] = c.single_pass;
    j["forced_crossover"] = c.forced_crossover;
    j["threads"] = c.threads;
    j["top_k"] = c.top_k;
    j["checkpoint_every"] = c.checkpoint_every;
    return j;
}

RunConfig config_from_json(const ordered_json& j) {
    RunConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("manifest", c.manifest_path);
    get("out_dir", c.out_dir);
    get("q_max", c.q_max);
    get("population", c.population);
    get("generations", c.generations);
    get("stagnation", c.stagnation);
    get("tau1", c.tau1);
    get("tau2", c.tau2);
    get("F_l", c.F_l);
    get("F_u", c.F_u);
    get("trim", c.trim);
    get("restarts", c.restarts);
    get("rel_tol", c.rel_tol);
    get("abs_tol", c.abs_tol);
    get("seed", c.seed);
    get("runs", c.runs);
    get("use_conservation", c.use_conservation);
    get("single_pass", c.single_pass);
    get("forced_crossover", c.forced_crossover);
    get("threads", c.threads);
    get("top_k", c.top_k);
    get("checkpoint_every", c.checkpoint_every);
    return c;
}

void validate(const RunConfig& c) {
    if (c.manifest_path.empty()) throw ConfigError("manifest path is required");
    if (!fs::exists(c.manifest_path)) throw ConfigError("manifest not found: " + c.manifest_path);
    if (c.q_max < 1) throw ConfigError("q_max must be >= 1");
    if (c.population < 4) throw ConfigError("population must be >= 4");
    if (c.generations < 1) throw ConfigError("generations must be >= 1");
    if (c.runs < 1) throw ConfigError("runs must be >= 1");
    if (c.trim < 0) throw ConfigError("trim must be >= 0");
    if (c.restarts < 1) throw ConfigError("restarts must be >= 1");
    for (double p : {c.tau1, c.tau2})
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("tau1/tau2 must lie in [0, 1]");
    if (!(c.F_l > 0.0 && c.F_u > 0.0 && c.F_l + c.F_u <= 2.0)) throw ConfigError("bad F bounds");
    if (!(c.rel_tol > 0.0 && c.abs_tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (c.threads < 1) throw ConfigError("threads must be >= 1");
    if (c.top_k < 1) throw ConfigError("top_k must be >= 1");
}

DEConfig de_config(const RunConfig& c, std::uint64_t run_seed) {
    DEConfig de;
    de.population_size = c.population;
    de.max_generations = c.generations;
    de.stagnation_limit = c.stagnation;
    de.q_max = c.q_max;
    de.tau1 = c.tau1;
    de.tau2 = c.tau2;
    de.F_l = c.F_l;
    de.F_u = c.F_u;
    de.seed = run_seed;
    de.forced_crossover_index = c.forced_crossover;
    de.threads = c.threads;
    return de;
}

ordered_json reaction_json(const Reaction& r, int q_max) {
    ordered_json j;
    j["text"] = to_string(r);
    ReactionNetwork one(std::max(r.max_species(), 1), {r});
    const std::vector<int> slots = encode_slots(one, 1);
    j["slots"] = std::vector<int>(slots.begin(), slots.begin() + kSlotsPerReaction);
    if (r.rate_coefficient()) j["k"] = *r.rate_coefficient();
    (void)q_max;
    return j;
}

ordered_json candidate_json(const CandidateReport& c, int q_max) {
    ordered_json j;
    j["rank"] = c.rank;
    j["q"] = c.network.reaction_count();
    j["valid"] = c.verdict.valid;
    j["reason"] = to_string(c.verdict.reason);
    j["alpha"] = c.verdict.alpha;
    j["sse_d"] = c.score_d.sse;
    j["sic_d"] = c.score_d.value;
    j["sse_c"] = c.score_c.sse;
    j["sic_c"] = c.score_c.value;
    j["sse_c_per_experiment"] = c.sse_c_per_experiment;
    ordered_json reactions = ordered_json::array();
    for (const auto& r : c.network.reactions()) reactions.push_back(reaction_json(r, q_max));
    j["reactions"] = reactions;
    return j;
}

ReactionNetwork candidate_network_from_json(const ordered_json& j, int species_count) {
    std::vector<Reaction> reactions;
    for (const auto& rj : j.at("reactions")) {
        const auto slots = rj.at("slots").get<std::vector<int>>();
        DecodedNetwork one = decode(slots, species_count, 1);
        if (one.network.reaction_count() != 1)
            throw ConfigError("corrupt candidate reaction slots in report");
        Reaction r = one.network.reaction(0).with_rate(rj.at("k").get<double>());
        reactions.push_back(std::move(r));
    }
    return ReactionNetwork(species_count, std::move(reactions));
}

std::optional<ConservationMatrix> manifest_conservation(const io::DatasetManifest& manifest,
                                                        bool use_conservation) {
    if (!use_conservation || !manifest.conservation) return std::nullopt;
    return ConservationMatrix(*manifest.conservation);
}

std::optional<ReactionNetwork> manifest_truth_network(const io::DatasetManifest& manifest) {
    if (!manifest.case_id) return std::nullopt;
    return make_case_study(*manifest.case_id).truth;
}

}  // namespace

RunConfig run_config_from_json_file(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path.string());
    try {
        return config_from_json(ordered_json::parse(f));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad config file " + path.string() + ": " + e.what());
    }
}

void write_run_config_json(const fs::path& path, const RunConfig& config) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write config file: " + path.string());
    f << config_to_json(config).dump(2) << "\n";
}

std::filesystem::path cmd_simulate(int case_id, std::uint64_t seed, const fs::path& out_dir,
                                   std::optional<double> noise_fraction, const std::string& name) {
    CaseStudy study;
    try {
        study = make_case_study(case_id);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (noise_fraction) {
        if (*noise_fraction < 0) throw ConfigError("noise fraction must be >= 0");
        study.noise_fraction = *noise_fraction;
    }

    // Transcription consistency gates on the benchmark definitions.
    const Eigen::MatrixXi n_matrix = stoichiometric_matrix(study.truth);
    if (study.conservation && !conservation_valid(n_matrix, *study.conservation))
        throw std::runtime_error("case study transcription inconsistent: A N != 0");
    if (!nullspace_valid(n_matrix))
        throw std::runtime_error("case study transcription inconsistent: no conserved vector");

    const std::string dataset = name.empty() ? "case" + std::to_string(case_id) : name;
    fs::create_directories(out_dir);

    const auto experiments = simulate_dataset(study, seed);
    io::DatasetManifest manifest;
    manifest.species_count = study.truth.species_count();
    manifest.seed = seed;
    manifest.noise_fraction = study.noise_fraction;
    if (study.conservation) manifest.conservation = study.conservation->values();
    manifest.case_id = case_id;
    for (size_t m = 0; m < experiments.size(); ++m) {
        const std::string stem = dataset + "_expt" + std::to_string(m + 1);
        manifest.files.push_back(stem + ".csv");
        manifest.truth_files.push_back(stem + "_truth.csv");
        io::write_experiment_csv(out_dir / manifest.files.back(), experiments[m].times,
                                 experiments[m].measured);
        io::write_experiment_csv(out_dir / manifest.truth_files.back(), experiments[m].times,
                                 *experiments[m].truth);
    }
    const fs::path manifest_path = out_dir / (dataset + "_manifest.json");
    io::write_manifest(manifest_path, manifest);
    return manifest_path;
}

void cmd_smooth(const fs::path& manifest_path, const fs::path& out_dir,
                const SmoothOptions& options) {
    io::Dataset dataset;
    try {
        dataset = io::load_dataset(manifest_path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    fs::create_directories(out_dir);
    const auto smoothed = smooth_dataset(dataset.experiments, options);
    for (size_t m = 0; m < smoothed.size(); ++m) {
        std::ofstream f(out_dir / ("smooth_expt" + std::to_string(m + 1) + ".csv"));
        if (!f) throw ConfigError("cannot write smoothing report");
        f << "time,species,measured,fitted,derivative\n";
        const auto& sm = smoothed[m];
        for (int s = 0; s < sm.species_count(); ++s)
            for (int n = 0; n < sm.kept_count(); ++n)
                f << io::format_double(sm.times(n)) << "," << (s + 1) << ","
                  << io::format_double(sm.concentrations(n, s)) << ","
                  << io::format_double(eval_rational(sm.fits[static_cast<size_t>(s)].p, sm.times(n)))
                  << "," << io::format_double(sm.derivatives(n, s)) << "\n";
    }
}

InferSummary cmd_infer(const RunConfig& config) {
    validate(config);
    io::Dataset dataset;
    try {
        dataset = io::load_dataset(config.manifest_path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const int species_count = dataset.manifest.species_count;
    const auto conservation = manifest_conservation(dataset.manifest, config.use_conservation);
    const auto truth = manifest_truth_network(dataset.manifest);

    const fs::path out(config.out_dir);
    fs::create_directories(out);
    write_run_config_json(out / "config.json", config);

    SmoothOptions smooth_options{config.trim, config.restarts, derive_seed(config.seed, kSaltSmooth)};
    const auto smoothed = smooth_dataset(dataset.experiments, smooth_options);

    IntegratorOptions integrator;
    integrator.rel_tol = config.rel_tol;
    integrator.abs_tol = config.abs_tol;

    RegressionOptions regression;
    regression.single_pass = config.single_pass;

    InferSummary summary;
    ordered_json summary_runs = ordered_json::array();
    int recovered = 0;

    for (int r = 0; r < config.runs; ++r) {
        const std::uint64_t run_seed = config.seed + static_cast<std::uint64_t>(r);
        const fs::path run_dir = out / ("run_" + std::to_string(r + 1));
        fs::create_directories(run_dir);

        DerivativeObjective objective(smoothed, conservation, species_count, config.q_max,
                                      regression);
        CheckpointFn checkpoint = [&](int generation, const Population& population) {
            io::write_population_csv(
                run_dir / ("checkpoint_gen" + std::to_string(generation) + ".csv"), population);
        };
        const RunResult result = run_de(de_config(config, run_seed), objective, species_count,
                                        checkpoint, config.checkpoint_every);

        io::write_run_log_csv(run_dir / "run_log.csv", result.history);
        io::write_population_csv(run_dir / "final_population.csv", result.population);

        SelectConfig select_config;
        select_config.top_k = config.top_k;
        select_config.integrator = integrator;
        const SelectionResult selection = select_model(result.population, dataset.experiments,
                                                       select_config);

        ordered_json run_json;
        run_json["config"] = config_to_json(config);
        run_json["run_index"] = r + 1;
        run_json["de_seed"] = run_seed;
        run_json["generations_completed"] = result.generations_completed;
        run_json["stagnated"] = result.stagnated;
        run_json["best_sic_d"] = result.history.back().best_sic_d;
        run_json["no_solution"] = selection.no_solution;
        ordered_json candidates = ordered_json::array();
        for (const auto& c : selection.candidates) candidates.push_back(candidate_json(c, config.q_max));
        run_json["candidates"] = candidates;
        {
            std::ofstream f(run_dir / "candidates.json");
            if (!f) throw ConfigError("cannot write candidates.json");
            f << run_json.dump(2) << "\n";
        }

        RunArtifacts artifacts;
        artifacts.directory = run_dir;
        artifacts.selection = selection;
        artifacts.generations_completed = result.generations_completed;
        artifacts.stagnated = result.stagnated;
        artifacts.best_sic_d = result.history.back().best_sic_d;

        ordered_json srun;
        srun["run_index"] = r + 1;
        srun["de_seed"] = run_seed;
        srun["generations"] = result.generations_completed;
        srun["stagnated"] = result.stagnated;
        srun["best_sic_d"] = result.history.back().best_sic_d;
        srun["no_solution"] = selection.no_solution;
        if (!selection.candidates.empty()) {
            const auto& top = selection.candidates.front();
            srun["rank1_sic_c"] = top.score_c.value;
            srun["rank1_q"] = top.network.reaction_count();
            ordered_json rs = ordered_json::array();
            for (const auto& rx : top.network.reactions()) rs.push_back(to_string(rx));
            srun["rank1_reactions"] = rs;
            if (truth) {
                const bool ok = !selection.no_solution &&
                                compare_topology(top.network, *truth).match;
                srun["recovered"] = ok;
                if (ok) ++recovered;
            }
        }
        summary_runs.push_back(std::move(srun));
        summary.runs.push_back(std::move(artifacts));
    }

    summary.recovered_count = truth ? recovered : -1;

    ordered_json sj;
    sj["config"] = config_to_json(config);
    sj["runs"] = summary_runs;
    if (truth) {
        sj["recovered_count"] = recovered;
        sj["total_runs"] = config.runs;
        // Coefficient statistics over recovered runs, in truth reaction order.
        std::vector<std::vector<double>> per_reaction(
            static_cast<size_t>(truth->reaction_count()));
        for (const auto& run : summary.runs) {
            if (run.selection.candidates.empty()) continue;
            const auto& top = run.selection.candidates.front();
            if (!compare_topology(top.network, *truth).match) continue;
            for (int j = 0; j < truth->reaction_count(); ++j) {
                for (const auto& rx : top.network.reactions())
                    if (rx == truth->reaction(j))
                        per_reaction[static_cast<size_t>(j)].push_back(*rx.rate_coefficient());
            }
        }
        ordered_json kstats = ordered_json::array();
        for (int j = 0; j < truth->reaction_count(); ++j) {
            const auto& ks = per_reaction[static_cast<size_t>(j)];
            ordered_json e;
            e["reaction"] = to_string(truth->reaction(j));
            e["true_k"] = *truth->reaction(j).rate_coefficient();
            if (!ks.empty()) {
                double mean = 0;
                for (double k : ks) mean += k;
                mean /= static_cast<double>(ks.size());
                e["mean_estimate"] = mean;
                e["estimates"] = ks;
            }
            kstats.push_back(std::move(e));
        }
        sj["coefficients"] = kstats;
    }
    {
        std::ofstream f(out / "summary.json");
        if (!f) throw ConfigError("cannot write summary.json");
        f << sj.dump(2) << "\n";
    }
    return summary;
}

SelectionResult cmd_select(const fs::path& run_dir) {
    std::ifstream f(run_dir / "candidates.json");
    if (!f) throw ConfigError("no candidates.json in " + run_dir.string());
    const ordered_json run_json = ordered_json::parse(f);
    const RunConfig config = config_from_json(run_json.at("config"));

    io::Dataset dataset;
    try {
        dataset = io::load_dataset(config.manifest_path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const int species_count = dataset.manifest.species_count;
    const auto conservation = manifest_conservation(dataset.manifest, config.use_conservation);

    SmoothOptions smooth_options{config.trim, config.restarts, derive_seed(config.seed, kSaltSmooth)};
    const auto smoothed = smooth_dataset(dataset.experiments, smooth_options);

    RegressionOptions regression;
    regression.single_pass = config.single_pass;
    DerivativeObjective objective(smoothed, conservation, species_count, config.q_max, regression);

    const auto rows = io::read_population_csv(run_dir / "final_population.csv");
    if (rows.empty()) throw ConfigError("empty final population checkpoint");
    Population population;
    for (const auto& row : rows) {
        Individual ind;
        ind.genome = make_genome(row.genome, species_count, config.q_max);
        ind.F = row.F;
        ind.CR = row.CR;
        ind.eval = objective.evaluate(round_genome(ind.genome));
        population.push_back(std::move(ind));
    }

    SelectConfig select_config;
    select_config.top_k = config.top_k;
    select_config.integrator.rel_tol = config.rel_tol;
    select_config.integrator.abs_tol = config.abs_tol;
    return select_model(population, dataset.experiments, select_config);
}

void cmd_report(const fs::path& run_dir) {
    std::ifstream f(run_dir / "candidates.json");
    if (!f) throw ConfigError("no candidates.json in " + run_dir.string());
    const ordered_json run_json = ordered_json::parse(f);
    const RunConfig config = config_from_json(run_json.at("config"));

    io::Dataset dataset;
    try {
        dataset = io::load_dataset(config.manifest_path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const int species_count = dataset.manifest.species_count;

    ordered_json report;
    report["config"] = config_to_json(config);
    const auto& candidates = run_json.at("candidates");
    if (candidates.empty() || run_json.value("no_solution", false)) {
        report["no_solution"] = true;
        std::ofstream out(run_dir / "report_summary.json");
        if (!out) throw ConfigError("cannot write report_summary.json");
        out << report.dump(2) << "\n";
        return;
    }

    const ReactionNetwork network = candidate_network_from_json(candidates.at(0), species_count);
    SmoothOptions smooth_options{config.trim, config.restarts, derive_seed(config.seed, kSaltSmooth)};
    const auto smoothed = smooth_dataset(dataset.experiments, smooth_options);

    IntegratorOptions integrator;
    integrator.rel_tol = config.rel_tol;
    integrator.abs_tol = config.abs_tol;

    report["no_solution"] = false;
    report["rank1"] = candidates.at(0);
    ordered_json files = ordered_json::array();

    for (size_t m = 0; m < dataset.experiments.size(); ++m) {
        const auto& e = dataset.experiments[m];
        const Eigen::VectorXd x0 = e.measured.row(0).transpose();
        const TryIntegrateResult pred = try_integrate(network, x0, e.times, integrator);
        if (pred.status != OdeStatus::ok)
            throw IntegrationFailure(pred.status, pred.last_valid_time);

        const std::string stem = "report_expt" + std::to_string(m + 1);
        std::ofstream csv(run_dir / (stem + ".csv"));
        if (!csv) throw ConfigError("cannot write report csv");
        csv << "time,species,measured,fitted,predicted\n";
        for (int s = 0; s < species_count; ++s) {
            const auto& fit = smoothed[m].fits[static_cast<size_t>(s)];
            for (int n = 0; n < e.sample_count(); ++n)
                csv << io::format_double(e.times(n)) << "," << (s + 1) << ","
                    << io::format_double(e.measured(n, s)) << ","
                    << io::format_double(eval_rational(fit.p, e.times(n))) << ","
                    << io::format_double(pred.samples(n, s)) << "\n";
        }
        io::write_series_svg(run_dir / (stem + ".svg"), e.times, e.measured, &pred.samples,
                             "experiment " + std::to_string(m + 1));
        files.push_back(stem + ".csv");
        files.push_back(stem + ".svg");
    }
    report["files"] = files;
    std::ofstream out(run_dir / "report_summary.json");
    if (!out) throw ConfigError("cannot write report_summary.json");
    out << report.dump(2) << "\n";
}

}  // namespace crn
