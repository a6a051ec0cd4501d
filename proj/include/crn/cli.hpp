#pragma once

#include "crn/io.hpp"
#include "crn/selection.hpp"
#include "crn/simulate.hpp"
#include "crn/smooth.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace crn {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a full inference run needs; mirrored 1:1 by CLI flags and the
/// JSON config file (flags win over file values).
struct RunConfig {
    std::string manifest_path;
    std::string out_dir = ".";
    int q_max = 10;
    int population = 400;
    int generations = 2000;
    int stagnation = 500;
    double tau1 = 0.1;
    double tau2 = 0.1;
    double F_l = 0.1;
    double F_u = 0.9;
    int trim = 4;
    int restarts = 10;
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    std::uint64_t seed = 0;
    int runs = 10;
    bool use_conservation = true;
    bool single_pass = false;
    bool forced_crossover = true;
    int threads = 1;
    int top_k = 10;
    int checkpoint_every = 500;
};

RunConfig run_config_from_json_file(const std::filesystem::path& path);
void write_run_config_json(const std::filesystem::path& path, const RunConfig& config);

/// Simulates a benchmark dataset: per-experiment measured and truth CSVs plus
/// a manifest. Returns the manifest path.
std::filesystem::path cmd_simulate(int case_id, std::uint64_t seed,
                                   const std::filesystem::path& out_dir,
                                   std::optional<double> noise_fraction = std::nullopt,
                                   const std::string& name = "");

/// Smoothing report: one `time,species,measured,fitted,derivative` CSV per
/// experiment (kept times only).
void cmd_smooth(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir,
                const SmoothOptions& options);

struct RunArtifacts {
    std::filesystem::path directory;
    SelectionResult selection;
    int generations_completed = 0;
    bool stagnated = false;
    double best_sic_d = 0.0;
};

struct InferSummary {
    std::vector<RunArtifacts> runs;
    int recovered_count = -1;  // -1 when the truth network is unknown
};

/// Smooths once, then executes `runs` independent seeded DE runs with model
/// selection, writing per-run artifacts and a cross-run summary.
InferSummary cmd_infer(const RunConfig& config);

/// Re-runs model selection for an existing run directory from its final
/// population checkpoint.
SelectionResult cmd_select(const std::filesystem::path& run_dir);

/// Trajectory tables and SVG plots (measured vs fitted vs rank-1 prediction)
/// for an existing run directory.
void cmd_report(const std::filesystem::path& run_dir);

}  // namespace crn
