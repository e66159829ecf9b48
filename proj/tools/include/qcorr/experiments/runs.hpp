// runs.hpp - single experiment runs, CSV tables and run metadata

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcorr/experiments/config.hpp"

namespace qcorr::experiments {

inline constexpr std::array<const char*, 11> csv_columns = {
    "t", "E_A", "E_B", "SED", "Q_A", "Q_B", "concurrence", "mutual_info", "Sigma0", "Sigma", "V_expect"};

using CsvRow = std::array<double, csv_columns.size()>;

struct RunSummary {
    double q_a_final = 0.0;
    double q_b_final = 0.0;
    double q_b_early = 0.0;   // Q_B at t = pi / (2 Omega) (or t_final if shorter)
    double I0 = 0.0;
    double cop_ratio = 0.0;   // NaN when I0 = 0
    double sigma_min = 0.0;
    double sigma0_min = 0.0;
    double sed_period = 0.0;  // NaN if fewer than two SED extrema were sampled
};

struct RunOutput {
    std::string label;
    ExperimentConfig config;
    std::vector<CsvRow> rows;
    RunSummary summary;
    nlohmann::json extra = nlohmann::json::object();
};

// Initial state for closed/open runs: Gibbs product plus the configured chi.
DensityOperator initial_state(const ExperimentConfig& cfg);

RunOutput run_closed(const ExperimentConfig& cfg, const std::string& label);
RunOutput run_open(const ExperimentConfig& cfg, const std::string& label);
RunOutput run_pump_experiment(const ExperimentConfig& cfg, const std::string& label);
// Dispatches on cfg.mode (closed, open or pump).
RunOutput run_single(const ExperimentConfig& cfg, const std::string& label);

// Period of the SED oscillation from successive sampled extrema (parabolic
// interpolation). NaN if fewer than two extrema.
double sed_period(const std::vector<double>& t, const std::vector<double>& sed);

// Fixed 17-significant-digit decimal format.
std::string format_double(double v);

void write_csv(const std::filesystem::path& file, const std::vector<CsvRow>& rows);

nlohmann::json config_json(const ExperimentConfig& cfg);
nlohmann::json ladder_json(const LadderReport& r);

// Writes <dir>/<label>.csv and returns its metadata entry.
nlohmann::json write_run(const std::filesystem::path& dir, const RunOutput& run);

// Metadata document: resolved parameters, depth, files and ladder results.
void write_metadata(const std::filesystem::path& file, const nlohmann::json& doc);

} // namespace qcorr::experiments
