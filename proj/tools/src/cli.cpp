#include "qcorr/experiments/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qcorr/experiments/sweep.hpp"

namespace qcorr::experiments {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json header(const ExperimentConfig& cfg, int argc, const char* const* argv) {
    nlohmann::json j;
    j["tool"] = "qcorr-pump";
    j["version"] = QCORR_VERSION;
    std::vector<std::string> cmd(argv, argv + argc);
    j["command_line"] = cmd;
    j["mode"] = to_string(cfg.mode);
    j["preset"] = cfg.preset;
    j["hierarchy_depth"] = cfg.depth;
    j["config"] = config_json(cfg);
    j["csv_columns"] = csv_columns;
    return j;
}

int report(std::ostream& err, int code, const std::string& what) {
    err << "qcorr-pump: " << what << '\n';
    return code;
}

} // namespace

std::optional<std::size_t> ado_cap_from_env() {
    const char* raw = std::getenv("QCORR_PUMP_CAP");
    if (!raw) return std::nullopt;
    const std::string s(raw);
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty() || s.front() == '-' || v == 0)
        throw config_error("QCORR_PUMP_CAP: expected a positive integer (got '" + s + "')");
    return static_cast<std::size_t>(v);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Correlation-fuelled two-qubit heat pump simulator"};
    app.name("qcorr-pump");
    std::string mode_name, config_path, out_dir, preset;
    std::optional<int> depth, matsubara;
    bool reset_ados = false;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    app.add_option("mode", mode_name, "closed | open | pump | sweep | preset")
        ->required()
        ->check(CLI::IsMember({"closed", "open", "pump", "sweep", "preset"}));
    app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--preset", preset, "figure preset: fig1 .. fig5");
    app.add_option("--depth", depth, "hierarchy depth L")->check(CLI::Range(1, 32));
    app.add_option("--matsubara", matsubara, "Matsubara terms K on both baths")->check(CLI::Range(0, 16));
    app.add_flag("--reset-ados", reset_ados, "zero the higher-tier ADOs at each fuel injection");
    app.add_option("--jobs", jobs, "sweep worker threads")->check(CLI::Range(1, 4096));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_config;
    }

    try {
        const Mode mode = parse_mode(mode_name);
        ExperimentConfig base = preset.empty() ? default_config() : preset_config(preset);
        base.mode = mode;
        ExperimentConfig cfg = base;
        if (!config_path.empty()) {
            cfg = parse_config(read_file(config_path), base);
            if (!preset.empty() && cfg.preset != preset)
                throw config_error("preset: --preset " + preset + " conflicts with preset = " + cfg.preset +
                                   " in " + config_path);
        }
        cfg.mode = mode;
        if (depth) cfg.depth = *depth;
        if (matsubara) cfg.bath_a.n_matsubara = cfg.bath_b.n_matsubara = *matsubara;
        if (reset_ados) cfg.reset_ados = true;
        if (auto cap = ado_cap_from_env()) cfg.ado_cap = *cap;
        cfg.sync();
        cfg.validate();

        fs::create_directories(out_dir);
        nlohmann::json meta = header(cfg, argc, argv);
        nlohmann::json runs = nlohmann::json::array();

        switch (mode) {
        case Mode::closed:
        case Mode::open:
        case Mode::pump: {
            const std::string label = cfg.preset.empty() ? mode_name : cfg.preset + "_" + mode_name;
            out << "running " << label << '\n';
            runs.push_back(write_run(out_dir, run_single(cfg, label)));
            break;
        }
        case Mode::preset: {
            if (cfg.preset.empty()) throw config_error("preset: missing required key (use --preset or preset = ...)");
            for (const auto& r : preset_runs(cfg)) {
                out << "running " << r.label << '\n';
                runs.push_back(write_run(out_dir, run_single(r.config, r.label)));
            }
            break;
        }
        case Mode::sweep: {
            out << "sweeping " << cfg.sweep.param << " over " << cfg.sweep.values.size() << " values with " << jobs
                << " worker(s)\n";
            nlohmann::json per_run;
            const auto rows = run_sweep(cfg, jobs, out_dir, &per_run);
            write_sweep_summary(fs::path(out_dir) / "sweep_summary.csv", rows);
            runs = per_run;
            meta["summary_file"] = "sweep_summary.csv";
            meta["summary_columns"] = sweep_columns;
            break;
        }
        }
        meta["runs"] = runs;
        write_metadata(fs::path(out_dir) / "metadata.json", meta);
        out << "wrote " << runs.size() << " run(s) to " << out_dir << '\n';
        return exit_ok;
    } catch (const config_error& e) {
        return report(err, exit_config, e.what());
    } catch (const feasibility_error& e) {
        return report(err, exit_config, e.what());
    } catch (const step_size_error& e) {
        return report(err, exit_config, e.what());
    } catch (const resource_error& e) {
        return report(err, exit_resource, e.what());
    } catch (const qcorr::error& e) {
        return report(err, exit_numerical, e.what());
    } catch (const std::exception& e) {
        return report(err, exit_io, e.what());
    }
}

} // namespace qcorr::experiments
