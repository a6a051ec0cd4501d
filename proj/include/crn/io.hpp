#pragma once

#include "crn/evolve.hpp"
#include "crn/integrate.hpp"
#include "crn/selection.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace crn::io {

/// Shortest round-trip decimal form (never loses bits on re-read).
std::string format_double(double value);

void write_experiment_csv(const std::filesystem::path& path, const Eigen::VectorXd& times,
                          const Eigen::MatrixXd& concentrations);

/// Reads a `time,x1,...,xS` file. The grid must be uniform and increasing.
ExperimentSeries read_experiment_csv(const std::filesystem::path& path);

struct DatasetManifest {
    std::vector<std::string> files;        // measured data, relative to the manifest
    int species_count = 0;
    std::uint64_t seed = 0;
    double noise_fraction = 0.0;
    std::optional<Eigen::MatrixXd> conservation;
    std::vector<std::string> truth_files;  // optional noise-free companions
    std::optional<int> case_id;            // set when generated from a benchmark network
};

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

struct Dataset {
    DatasetManifest manifest;
    std::vector<ExperimentSeries> experiments;
};

/// Reads the manifest and every experiment file (truth merged in when listed).
Dataset load_dataset(const std::filesystem::path& manifest_path);

/// Population checkpoint: one row per individual, 5*q_max genome values
/// followed by F and CR.
void write_population_csv(const std::filesystem::path& path, const Population& population);
struct CheckpointRow {
    Eigen::VectorXd genome;
    double F = 0.0;
    double CR = 0.0;
};
std::vector<CheckpointRow> read_population_csv(const std::filesystem::path& path);

void write_run_log_csv(const std::filesystem::path& path,
                       const std::vector<GenerationStats>& history);

/// Simple dots-and-lines SVG: measured markers with optional overlay curves.
void write_series_svg(const std::filesystem::path& path, const Eigen::VectorXd& times,
                      const Eigen::MatrixXd& measured, const Eigen::MatrixXd* overlay,
                      const std::string& title);

}  // namespace crn::io
