#include "crn/cli.hpp"
#include "crn/smooth.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

namespace {

std::string default_out_root() {
    const char* env = std::getenv("CRNINFER_OUT");
    return env && *env ? env : ".";
}

int hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void print_selection(const crn::SelectionResult& selection) {
    if (selection.no_solution) {
        std::cout << "no candidate integrated successfully\n";
        return;
    }
    for (const auto& c : selection.candidates) {
        std::cout << "rank " << c.rank << "  q=" << c.network.reaction_count()
                  << "  sic_c=" << c.score_c.value << "  sic_d=" << c.score_d.value
                  << (c.verdict.valid ? "" : "  [invalid: " + to_string(c.verdict.reason) + "]")
                  << "\n";
        for (const auto& r : c.network.reactions()) std::cout << "    " << to_string(r) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reverse engineering of elementary reaction networks from time series data"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate a benchmark dataset");
    int case_id = 1;
    std::uint64_t sim_seed = 0;
    std::string sim_out = default_out_root();
    std::string sim_name;
    double sim_noise = -1.0;
    simulate->add_option("case", case_id, "case study id (1, 2 or 3)")->required();
    simulate->add_option("--seed", sim_seed, "dataset seed");
    simulate->add_option("--out", sim_out, "output directory");
    simulate->add_option("--name", sim_name, "dataset name (default case<id>)");
    simulate->add_option("--noise", sim_noise, "noise fraction override (default 0.04)");

    // smooth
    auto* smooth = app.add_subcommand("smooth", "emit smoothing reports for a dataset");
    std::string smooth_manifest;
    std::string smooth_out = default_out_root();
    crn::SmoothOptions smooth_options;
    smooth->add_option("manifest", smooth_manifest, "dataset manifest")->required();
    smooth->add_option("--out", smooth_out, "output directory");
    smooth->add_option("--trim", smooth_options.trim, "samples trimmed at each end");
    smooth->add_option("--restarts", smooth_options.restarts, "fit restarts per signal");
    smooth->add_option("--seed", smooth_options.seed, "smoothing seed");

    // infer
    auto* infer = app.add_subcommand("infer", "run the full inference pipeline");
    std::string config_path;
    crn::RunConfig run;
    run.out_dir = default_out_root();
    run.threads = hardware_threads();
    infer->add_option("--config", config_path, "JSON config file (flags override it)");
    infer->add_option("--manifest", run.manifest_path, "dataset manifest");
    infer->add_option("--out", run.out_dir, "output directory");
    infer->add_option("--q-max", run.q_max, "maximum reactions per trial network");
    infer->add_option("--population", run.population, "DE population size");
    infer->add_option("--generations", run.generations, "DE generation limit");
    infer->add_option("--stagnation", run.stagnation, "early-stop generation window");
    infer->add_option("--tau1", run.tau1, "F mutation probability");
    infer->add_option("--tau2", run.tau2, "CR mutation probability");
    infer->add_option("--f-l", run.F_l, "F mutation lower parameter");
    infer->add_option("--f-u", run.F_u, "F mutation scale parameter");
    infer->add_option("--trim", run.trim, "samples trimmed at each end");
    infer->add_option("--restarts", run.restarts, "fit restarts per signal");
    infer->add_option("--rel-tol", run.rel_tol, "integrator relative tolerance");
    infer->add_option("--abs-tol", run.abs_tol, "integrator absolute tolerance");
    infer->add_option("--seed", run.seed, "master seed (run r uses seed + r)");
    infer->add_option("--runs", run.runs, "number of independent DE runs");
    infer->add_flag("--no-conservation,!--conservation", [](std::int64_t) {},
                    "ignore the manifest conservation matrix");
    infer->add_flag("--single-pass", run.single_pass, "paper-literal single-pass pruning");
    infer->add_flag("--no-forced-crossover", [](std::int64_t) {},
                    "paper-literal crossover without a forced donor index");
    infer->add_option("--threads", run.threads, "objective evaluation threads");
    infer->add_option("--top-k", run.top_k, "candidates kept per run");
    infer->add_option("--checkpoint-every", run.checkpoint_every,
                      "generations between checkpoints (0 disables)");

    // select / report
    auto* select = app.add_subcommand("select", "re-run model selection for a run directory");
    std::string select_dir;
    select->add_option("run_dir", select_dir, "run directory")->required();

    auto* report = app.add_subcommand("report", "emit trajectory tables and plots for a run");
    std::string report_dir;
    report->add_option("run_dir", report_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*simulate) {
            std::optional<double> noise;
            if (sim_noise >= 0) noise = sim_noise;
            const auto manifest = crn::cmd_simulate(case_id, sim_seed, sim_out, noise, sim_name);
            std::cout << "wrote " << manifest.string() << "\n";
        } else if (*smooth) {
            crn::cmd_smooth(smooth_manifest, smooth_out, smooth_options);
            std::cout << "smoothing reports written to " << smooth_out << "\n";
        } else if (*infer) {
            if (!config_path.empty()) {
                // File values fill in everything the command line left untouched.
                crn::RunConfig file = crn::run_config_from_json_file(config_path);
                auto keep = [&](const std::string& flag) { return infer->count(flag) > 0; };
                crn::RunConfig merged = file;
                if (keep("--manifest")) merged.manifest_path = run.manifest_path;
                if (keep("--out")) merged.out_dir = run.out_dir;
                if (keep("--q-max")) merged.q_max = run.q_max;
                if (keep("--population")) merged.population = run.population;
                if (keep("--generations")) merged.generations = run.generations;
                if (keep("--stagnation")) merged.stagnation = run.stagnation;
                if (keep("--tau1")) merged.tau1 = run.tau1;
                if (keep("--tau2")) merged.tau2 = run.tau2;
                if (keep("--f-l")) merged.F_l = run.F_l;
                if (keep("--f-u")) merged.F_u = run.F_u;
                if (keep("--trim")) merged.trim = run.trim;
                if (keep("--restarts")) merged.restarts = run.restarts;
                if (keep("--rel-tol")) merged.rel_tol = run.rel_tol;
                if (keep("--abs-tol")) merged.abs_tol = run.abs_tol;
                if (keep("--seed")) merged.seed = run.seed;
                if (keep("--runs")) merged.runs = run.runs;
                if (keep("--single-pass")) merged.single_pass = run.single_pass;
                if (keep("--threads")) merged.threads = run.threads;
                if (keep("--top-k")) merged.top_k = run.top_k;
                if (keep("--checkpoint-every")) merged.checkpoint_every = run.checkpoint_every;
                run = merged;
            }
            if (infer->count("--no-conservation") > 0) run.use_conservation = false;
            if (infer->count("--no-forced-crossover") > 0) run.forced_crossover = false;
            const auto summary = crn::cmd_infer(run);
            for (size_t r = 0; r < summary.runs.size(); ++r) {
                std::cout << "run " << (r + 1) << ": " << summary.runs[r].generations_completed
                          << " generations"
                          << (summary.runs[r].stagnated ? " (stagnated)" : "") << "\n";
                if (!summary.runs[r].selection.candidates.empty()) {
                    const auto& top = summary.runs[r].selection.candidates.front();
                    std::cout << "  rank-1 sic_c=" << top.score_c.value << "\n";
                    for (const auto& rx : top.network.reactions())
                        std::cout << "    " << to_string(rx) << "\n";
                }
            }
            if (summary.recovered_count >= 0)
                std::cout << "recovered true topology in " << summary.recovered_count << "/"
                          << summary.runs.size() << " runs\n";
        } else if (*select) {
            print_selection(crn::cmd_select(select_dir));
        } else if (*report) {
            crn::cmd_report(report_dir);
            std::cout << "report written to " << report_dir << "\n";
        }
    } catch (const crn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const crn::IntegrationFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const crn::SmoothingFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
