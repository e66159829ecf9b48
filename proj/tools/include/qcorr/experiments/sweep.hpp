// sweep.hpp - parameter sweeps on a worker pool and figure preset families

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qcorr/experiments/runs.hpp"

namespace qcorr::experiments {

inline constexpr std::array<const char*, 9> sweep_columns = {
    "index", "param", "value", "Q_B_final", "I0", "cop_ratio", "Sigma_min", "sed_period", "Q_B_early"};

struct SweepRow {
    int index = 0;
    std::string param;
    double value = 0.0;
    RunSummary summary;
};

// Runs every grid point of cfg.sweep with `jobs` workers. Results come back in
// grid order regardless of scheduling. Throws resource_error above max_runs and
// config_error for an empty grid. Per-run CSV/metadata go to out_dir when non-empty.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int jobs, const std::filesystem::path& out_dir,
                                nlohmann::json* runs_meta = nullptr);

void write_sweep_summary(const std::filesystem::path& file, const std::vector<SweepRow>& rows);

// The run list of a figure preset: label plus fully resolved config.
struct PresetRun {
    std::string label;
    ExperimentConfig config;
};
std::vector<PresetRun> preset_runs(const ExperimentConfig& preset);

} // namespace qcorr::experiments
