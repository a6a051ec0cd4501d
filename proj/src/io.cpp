#include "crn/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crn::io {

namespace {

using ordered_json = nlohmann::ordered_json;

void must_open(const std::ofstream& f, const std::filesystem::path& path) {
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path.string());
    return f;
}

double parse_double(std::string_view token, const std::filesystem::path& path) {
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw std::runtime_error("bad numeric field '" + std::string(token) + "' in " + path.string());
    return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
    return std::string(buf, ptr);
}

void write_experiment_csv(const std::filesystem::path& path, const Eigen::VectorXd& times,
                          const Eigen::MatrixXd& concentrations) {
    if (times.size() != concentrations.rows())
        throw std::invalid_argument("times/concentrations row mismatch");
    std::ofstream f(path);
    must_open(f, path);
    f << "time";
    for (long s = 0; s < concentrations.cols(); ++s) f << ",x" << (s + 1);
    f << "\n";
    for (long n = 0; n < times.size(); ++n) {
        f << format_double(times(n));
        for (long s = 0; s < concentrations.cols(); ++s)
            f << "," << format_double(concentrations(n, s));
        f << "\n";
    }
}

ExperimentSeries read_experiment_csv(const std::filesystem::path& path) {
    std::ifstream f = open_input(path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty csv: " + path.string());
    const auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "time")
        throw std::runtime_error("expected 'time,x1,...' header in " + path.string());
    const long s_count = static_cast<long>(header.size()) - 1;

    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (static_cast<long>(fields.size()) != s_count + 1)
            throw std::runtime_error("ragged csv row in " + path.string());
        times.push_back(parse_double(fields[0], path));
        for (long s = 1; s <= s_count; ++s)
            values.push_back(parse_double(fields[static_cast<size_t>(s)], path));
    }
    const long n = static_cast<long>(times.size());
    if (n < 2) throw std::runtime_error("need at least two samples in " + path.string());

    ExperimentSeries series;
    series.times = Eigen::Map<const Eigen::VectorXd>(times.data(), n);
    series.measured = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                     Eigen::RowMajor>>(values.data(), n, s_count);
    const double step = series.times(1) - series.times(0);
    for (long i = 1; i < n; ++i) {
        const double dt = series.times(i) - series.times(i - 1);
        if (!(dt > 0) || std::abs(dt - step) > 1e-9 * std::max(1.0, std::abs(step)))
            throw std::runtime_error("sample grid must be uniform and increasing: " + path.string());
    }
    return series;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    ordered_json j;
    j["files"] = manifest.files;
    j["S"] = manifest.species_count;
    j["seed"] = manifest.seed;
    j["noise_fraction"] = manifest.noise_fraction;
    if (manifest.conservation) {
        std::vector<std::vector<double>> rows;
        for (long r = 0; r < manifest.conservation->rows(); ++r) {
            std::vector<double> row;
            for (long c = 0; c < manifest.conservation->cols(); ++c)
                row.push_back((*manifest.conservation)(r, c));
            rows.push_back(std::move(row));
        }
        j["conservation"] = rows;
    }
    if (!manifest.truth_files.empty()) j["truth_files"] = manifest.truth_files;
    if (manifest.case_id) j["case_id"] = *manifest.case_id;
    std::ofstream f(path);
    must_open(f, path);
    f << j.dump(2) << "\n";
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream f = open_input(path);
    ordered_json j = ordered_json::parse(f);
    DatasetManifest m;
    m.files = j.at("files").get<std::vector<std::string>>();
    m.species_count = j.at("S").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.noise_fraction = j.at("noise_fraction").get<double>();
    if (j.contains("conservation")) {
        const auto rows = j["conservation"].get<std::vector<std::vector<double>>>();
        if (rows.empty()) throw std::runtime_error("empty conservation matrix in manifest");
        Eigen::MatrixXd a(static_cast<long>(rows.size()), static_cast<long>(rows[0].size()));
        for (size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != rows[0].size())
                throw std::runtime_error("ragged conservation matrix in manifest");
            for (size_t c = 0; c < rows[r].size(); ++c)
                a(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
        }
        m.conservation = a;
    }
    if (j.contains("truth_files")) m.truth_files = j["truth_files"].get<std::vector<std::string>>();
    if (j.contains("case_id")) m.case_id = j["case_id"].get<int>();
    return m;
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
    Dataset dataset;
    dataset.manifest = read_manifest(manifest_path);
    const std::filesystem::path base = manifest_path.parent_path();
    if (!dataset.manifest.truth_files.empty() &&
        dataset.manifest.truth_files.size() != dataset.manifest.files.size())
        throw std::runtime_error("manifest truth_files count mismatch");
    for (size_t i = 0; i < dataset.manifest.files.size(); ++i) {
        ExperimentSeries series = read_experiment_csv(base / dataset.manifest.files[i]);
        if (series.species_count() != dataset.manifest.species_count)
            throw std::runtime_error("experiment column count disagrees with manifest S");
        if (!dataset.manifest.truth_files.empty()) {
            const ExperimentSeries truth = read_experiment_csv(base / dataset.manifest.truth_files[i]);
            if (truth.measured.rows() != series.measured.rows() ||
                truth.measured.cols() != series.measured.cols())
                throw std::runtime_error("truth/measured shape mismatch");
            series.truth = truth.measured;
        }
        dataset.experiments.push_back(std::move(series));
    }
    if (dataset.manifest.conservation &&
        dataset.manifest.conservation->cols() != dataset.manifest.species_count)
        throw std::runtime_error("conservation matrix column count disagrees with manifest S");
    return dataset;
}

void write_population_csv(const std::filesystem::path& path, const Population& population) {
    std::ofstream f(path);
    must_open(f, path);
    for (const auto& ind : population) {
        for (long j = 0; j < ind.genome.values.size(); ++j)
            f << format_double(ind.genome.values(j)) << ",";
        f << format_double(ind.F) << "," << format_double(ind.CR) << "\n";
    }
}

std::vector<CheckpointRow> read_population_csv(const std::filesystem::path& path) {
    std::ifstream f = open_input(path);
    std::vector<CheckpointRow> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 3) throw std::runtime_error("short checkpoint row in " + path.string());
        CheckpointRow row;
        const long n = static_cast<long>(fields.size()) - 2;
        row.genome.resize(n);
        for (long j = 0; j < n; ++j) row.genome(j) = parse_double(fields[static_cast<size_t>(j)], path);
        row.F = parse_double(fields[fields.size() - 2], path);
        row.CR = parse_double(fields[fields.size() - 1], path);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_run_log_csv(const std::filesystem::path& path,
                       const std::vector<GenerationStats>& history) {
    std::ofstream f(path);
    must_open(f, path);
    f << "generation,best_sic_d,best_q,valid_fraction,mean_F,mean_CR\n";
    for (const auto& row : history) {
        f << row.generation << "," << format_double(row.best_sic_d) << "," << row.best_q << ","
          << format_double(row.valid_fraction) << "," << format_double(row.mean_F) << ","
          << format_double(row.mean_CR) << "\n";
    }
}

void write_series_svg(const std::filesystem::path& path, const Eigen::VectorXd& times,
                      const Eigen::MatrixXd& measured, const Eigen::MatrixXd* overlay,
                      const std::string& title) {
    const double width = 800, height = 480;
    const double ml = 60, mr = 20, mt = 40, mb = 40;
    const double t_lo = times.minCoeff(), t_hi = times.maxCoeff();
    double y_lo = measured.minCoeff(), y_hi = measured.maxCoeff();
    if (overlay) {
        y_lo = std::min(y_lo, overlay->minCoeff());
        y_hi = std::max(y_hi, overlay->maxCoeff());
    }
    if (y_hi - y_lo < 1e-12) y_hi = y_lo + 1.0;

    auto px = [&](double t) { return ml + (t - t_lo) / (t_hi - t_lo) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb); };
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

    std::ofstream f(path);
    must_open(f, path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
    for (long s = 0; s < measured.cols(); ++s) {
        const char* color = kPalette[s % 10];
        for (long n = 0; n < times.size(); ++n)
            f << "<circle cx=\"" << px(times(n)) << "\" cy=\"" << py(measured(n, s))
              << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        if (overlay) {
            f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (long n = 0; n < times.size(); ++n)
                f << px(times(n)) << "," << py((*overlay)(n, s)) << " ";
            f << "\"/>\n";
        }
        f << "<text x=\"" << width - mr - 45 << "\" y=\"" << mt + 16 * static_cast<double>(s + 1)
          << "\" fill=\"" << color << "\" font-size=\"12\">x" << (s + 1) << "</text>\n";
    }
    f << "</svg>\n";
}

}  // namespace crn::io
