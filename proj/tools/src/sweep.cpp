#include "qcorr/experiments/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <thread>

namespace qcorr::experiments {

namespace {

std::string run_label(int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03d", i);
    return buf;
}

} // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int jobs, const std::filesystem::path& out_dir,
                                nlohmann::json* runs_meta) {
    const auto& grid = cfg.sweep.values;
    if (grid.empty()) throw config_error("sweep.values: empty grid");
    if (static_cast<long long>(grid.size()) > cfg.sweep.max_runs)
        throw resource_error("sweep: " + std::to_string(grid.size()) + " runs exceed sweep.max_runs = " +
                             std::to_string(cfg.sweep.max_runs));

    // Resolve every point up front so configuration errors surface before any work.
    std::vector<ExperimentConfig> points;
    for (double v : grid) {
        ExperimentConfig c = cfg;
        c.mode = cfg.sweep.base;
        set_scalar(c, cfg.sweep.param, v);
        c.validate();
        points.push_back(std::move(c));
    }

    const std::size_t n = points.size();
    std::vector<SweepRow> rows(n);
    std::vector<nlohmann::json> meta(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                const RunOutput out = run_single(points[i], run_label(static_cast<int>(i)));
                rows[i] = {static_cast<int>(i), cfg.sweep.param, grid[i], out.summary};
                if (!out_dir.empty()) meta[i] = write_run(out_dir, out);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    if (runs_meta) *runs_meta = meta;
    return rows;
}

void write_sweep_summary(const std::filesystem::path& file, const std::vector<SweepRow>& rows) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + file.string() + "' for writing");
    for (std::size_t i = 0; i < sweep_columns.size(); ++i) os << (i ? "," : "") << sweep_columns[i];
    os << '\n';
    for (const auto& r : rows) {
        const auto& s = r.summary;
        os << r.index << ',' << r.param << ',' << format_double(r.value) << ',' << format_double(s.q_b_final) << ','
           << format_double(s.I0) << ',' << format_double(s.cop_ratio) << ',' << format_double(s.sigma_min) << ','
           << format_double(s.sed_period) << ',' << format_double(s.q_b_early) << '\n';
    }
    if (!os) throw std::runtime_error("write failed for '" + file.string() + "'");
}

// ---- presets ----

std::vector<PresetRun> preset_runs(const ExperimentConfig& preset) {
    constexpr double pi = std::numbers::pi;
    std::vector<PresetRun> runs;
    auto with_delta = [](ExperimentConfig c, double delta) {
        set_scalar(c, "pair.delta", delta);
        return c;
    };
    const std::string& name = preset.preset;

    if (name == "fig1") {
        ExperimentConfig c = preset;
        c.mode = Mode::closed;
        c.fuel.mode = FuelMode::optimal;
        runs.push_back({"fig1_delta_0", with_delta(c, 0.0)});
        runs.push_back({"fig1_delta_plus_pi_2", with_delta(c, 0.5 * pi)});
        runs.push_back({"fig1_delta_minus_pi_2", with_delta(c, -0.5 * pi)});
    } else if (name == "fig2") {
        ExperimentConfig c = preset;
        c.mode = Mode::closed;
        c.fuel.mode = FuelMode::optimal;
        const std::array<std::pair<const char*, double>, 2> kinds = {{{"normal", 0.0}, {"anomalous", -0.5 * pi}}};
        const std::array<std::tuple<const char*, double, double>, 3> temps = {
            {{"equal", 1.5, 1.5}, {"hot_a", 2.0, 1.0}, {"hot_b", 1.0, 2.0}}};
        for (const auto& [kind, delta] : kinds) {
            for (const auto& [tag, ta, tb] : temps) {
                ExperimentConfig r = with_delta(c, delta);
                r.pair.T_A = ta;
                r.pair.T_B = tb;
                r.sync();
                runs.push_back({std::string("fig2_") + kind + "_" + tag, r});
            }
        }
    } else if (name == "fig3") {
        ExperimentConfig c = preset;
        c.mode = Mode::open;
        runs.push_back({"fig3_anomalous", c});
    } else if (name == "fig4") {
        ExperimentConfig c = preset;
        c.mode = Mode::open;
        ExperimentConfig normal = c;
        normal.fuel.mode = FuelMode::none;
        normal.sync();
        runs.push_back({"fig4_normal", normal});
        runs.push_back({"fig4_anomalous", c});
    } else if (name == "fig5") {
        ExperimentConfig c = preset;
        c.mode = Mode::pump;
        runs.push_back({"fig5_pump", c});
        // Steady conduction with no correlation over the same wall time.
        ExperimentConfig normal = c;
        normal.mode = Mode::open;
        normal.fuel.mode = FuelMode::none;
        normal.ladder = false;
        const double tau = c.schedule.tau_connect.value_or(first_sed_maximum_time(c.pair));
        normal.t_final = c.schedule.n_cycles * (tau + c.schedule.tau_relax);
        normal.sync();
        runs.push_back({"fig5_normal", normal});
    } else {
        throw config_error("preset: unknown preset '" + name + "'");
    }
    return runs;
}

} // namespace qcorr::experiments
