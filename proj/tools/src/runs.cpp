#include "qcorr/experiments/runs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace qcorr::experiments {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::vector<CsvRow> make_rows(const std::vector<ThermoSnapshot>& snaps, const std::vector<double>& v_expect) {
    std::vector<CsvRow> rows;
    rows.reserve(snaps.size());
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const auto& s = snaps[i];
        rows.push_back({s.t, s.E_A, s.E_B, s.E_A - s.E_B, s.Q_A, s.Q_B, 0.0, s.I_AB, s.Sigma0, s.Sigma, v_expect[i]});
    }
    return rows;
}

double interpolate(const std::vector<double>& t, const std::vector<double>& y, double at) {
    if (t.empty()) return nan;
    if (at <= t.front()) return y.front();
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i] >= at) {
            const double span = t[i] - t[i - 1];
            if (span <= 0.0) return y[i];
            const double w = (at - t[i - 1]) / span;
            return (1.0 - w) * y[i - 1] + w * y[i];
        }
    }
    return y.back();
}

void fill_common(RunSummary& s, const std::vector<CsvRow>& rows, double omega) {
    std::vector<double> t, sed, qb;
    for (const auto& r : rows) {
        t.push_back(r[0]);
        sed.push_back(r[3]);
        qb.push_back(r[5]);
    }
    s.sigma_min = std::numeric_limits<double>::infinity();
    s.sigma0_min = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        s.sigma0_min = std::min(s.sigma0_min, r[8]);
        s.sigma_min = std::min(s.sigma_min, r[9]);
    }
    s.sed_period = sed_period(t, sed);
    s.q_b_early = interpolate(t, qb, 0.5 * std::numbers::pi / omega);
}

nlohmann::json summary_json(const RunSummary& s) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {{"Q_A_final", num(s.q_a_final)}, {"Q_B_final", num(s.q_b_final)}, {"Q_B_early", num(s.q_b_early)},
            {"I0", num(s.I0)},           {"cop_ratio", num(s.cop_ratio)}, {"Sigma_min", num(s.sigma_min)},
            {"Sigma0_min", num(s.sigma0_min)}, {"sed_period", num(s.sed_period)}};
}

} // namespace

// ---- runs ----

DensityOperator initial_state(const ExperimentConfig& cfg) {
    switch (cfg.fuel.mode) {
    case FuelMode::none: return gibbs_product(cfg.pair);
    case FuelMode::optimal: return correlated_state(cfg.pair, optimal_chi(cfg.pair));
    case FuelMode::custom: return correlated_state(cfg.pair, cfg.fuel.custom);
    }
    return gibbs_product(cfg.pair);
}

RunOutput run_closed(const ExperimentConfig& cfg, const std::string& label) {
    const DensityOperator rho0 = initial_state(cfg);
    const double dt = cfg.dt.value_or(std::min(0.01, 0.001 / cfg.pair.omega));
    const ClosedRun cr = integrate_lvn(cfg.pair, rho0, dt, cfg.t_final, cfg.output_stride);

    const std::size_t n = cr.trace.times.size();
    const std::vector<double> zero(n, 0.0);
    const auto snaps = thermo_series(cr.trace.times, cr.states, zero, zero, cfg.pair);
    const auto v = interaction_hamiltonian(cfg.pair);
    std::vector<double> ve;
    for (const auto& s : cr.states) ve.push_back(v.expectation(s));

    RunOutput out{label, cfg, make_rows(snaps, ve), {}, nlohmann::json::object()};
    for (std::size_t i = 0; i < n; ++i) out.rows[i][6] = cr.trace.concurrence[i];
    out.summary.I0 = mutual_information(rho0);
    out.summary.cop_ratio = nan;
    fill_common(out.summary, out.rows, cfg.pair.omega);
    out.extra["dt"] = dt;
    return out;
}

RunOutput run_open(const ExperimentConfig& cfg, const std::string& label) {
    const DensityOperator rho0 = initial_state(cfg);
    const BathSpec a = cfg.resolved_bath(0), b = cfg.resolved_bath(1);
    HierarchyState s = build_hierarchy(cfg.pair, a, b, cfg.depth, rho0, cfg.heom_options());
    const double dt = cfg.dt.value_or(s.model->max_step());
    const DissipativeRun run = run_dissipative(std::move(s), dt, cfg.t_final, cfg.output_stride);

    const auto snaps = thermo_series(run.trace.times, run.states, run.ledger.q_a, run.ledger.q_b, cfg.pair);
    RunOutput out{label, cfg, make_rows(snaps, run.ledger.e_int), {}, nlohmann::json::object()};
    for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i][6] = run.trace.concurrence[i];

    out.summary.q_a_final = run.ledger.q_a.back();
    out.summary.q_b_final = run.ledger.q_b.back();
    out.summary.I0 = mutual_information(rho0);
    out.summary.cop_ratio = out.summary.I0 > 0.0 ? out.summary.q_b_final / (cfg.pair.T_A * out.summary.I0) : nan;
    fill_common(out.summary, out.rows, cfg.pair.omega);
    out.extra["dt"] = dt;
    out.extra["n_ados"] = run.final_state.ados.size();
    if (cfg.ladder) {
        const double tl = std::min(cfg.ladder_t_final, cfg.t_final);
        if (tl > 0.0)
            out.extra["convergence_ladder"] =
                ladder_json(convergence_ladder(cfg.pair, a, b, cfg.depth, rho0, tl, tl / 10.0, cfg.heom_options()));
    }
    return out;
}

RunOutput run_pump_experiment(const ExperimentConfig& cfg, const std::string& label) {
    const BathSpec a = cfg.resolved_bath(0), b = cfg.resolved_bath(1);
    PumpOptions opt;
    opt.dt = cfg.dt.value_or(0.0);
    opt.output_stride = cfg.output_stride;
    opt.reset_ados = cfg.reset_ados;
    opt.tau_prethermalize = cfg.tau_prethermalize;
    opt.heom = cfg.heom_options();
    CycleSchedule sch = cfg.schedule;
    sch.chi = cfg.fuel;
    const PumpRun run = run_pump(cfg.pair, a, b, sch, cfg.depth, opt);

    const auto snaps = thermo_series(run.trace.times, run.states, run.ledger.q_a, run.ledger.q_b, cfg.pair);
    RunOutput out{label, cfg, make_rows(snaps, run.ledger.e_int), {}, nlohmann::json::object()};
    for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i][6] = run.trace.concurrence[i];

    nlohmann::json cycles = nlohmann::json::array();
    for (const auto& c : run.cycles) {
        const CopReport cop = cop_report(c, c.I0_injected, cfg.pair);
        cycles.push_back({{"cycle", c.cycle_index},
                          {"Q_A_cycle", c.Q_A_cycle},
                          {"Q_B_cycle", c.Q_B_cycle},
                          {"closure", c.Q_A_cycle + c.Q_B_cycle},
                          {"I0_injected", c.I0_injected},
                          {"residual_V", c.residual_V},
                          {"end_state_distance", c.end_state_distance},
                          {"cop_ratio", cop.cop_ratio},
                          {"carnot", cop.degenerate ? nlohmann::json(nullptr) : nlohmann::json(cop.carnot)},
                          {"cop_satisfied", cop.satisfied}});
    }
    out.extra["cycles"] = cycles;
    out.extra["tau_connect"] = run.tau_connect;
    if (run.refinement)
        out.extra["tau_refinement"] = {{"formula", run.refinement->formula},
                                       {"grid", run.refinement->grid},
                                       {"refined", run.refinement->refined},
                                       {"sed_max", run.refinement->sed_max}};
    out.extra["warnings"] = run.warnings;
    out.extra["n_ados"] = run.final_state.ados.size();

    const CycleRecord& last = run.cycles.back();
    out.summary.q_a_final = last.Q_A_cycle;
    out.summary.q_b_final = last.Q_B_cycle;
    out.summary.I0 = last.I0_injected;
    out.summary.cop_ratio = last.I0_injected > 0.0 ? cop_report(last, last.I0_injected, cfg.pair).cop_ratio : nan;
    fill_common(out.summary, out.rows, cfg.pair.omega);

    if (cfg.ladder) {
        ExperimentConfig c = cfg;
        const DensityOperator rho0 = initial_state(c);
        out.extra["convergence_ladder"] = ladder_json(
            convergence_ladder(cfg.pair, a, b, cfg.depth, rho0, cfg.ladder_t_final, cfg.ladder_t_final / 10.0,
                               cfg.heom_options()));
    }
    return out;
}

RunOutput run_single(const ExperimentConfig& cfg, const std::string& label) {
    switch (cfg.mode) {
    case Mode::closed: return run_closed(cfg, label);
    case Mode::open: return run_open(cfg, label);
    case Mode::pump: return run_pump_experiment(cfg, label);
    default: throw config_error("mode: '" + to_string(cfg.mode) + "' is not a single-run mode");
    }
}

double sed_period(const std::vector<double>& t, const std::vector<double>& sed) {
    std::vector<double> ext;
    for (std::size_t i = 1; i + 1 < sed.size(); ++i) {
        const double a = sed[i - 1], b = sed[i], c = sed[i + 1];
        const bool peak = b > a && b >= c;
        const bool trough = b < a && b <= c;
        if (!peak && !trough) continue;
        // Parabola through three equally spaced samples.
        const double h = 0.5 * (t[i + 1] - t[i - 1]);
        const double denom = a - 2.0 * b + c;
        const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
        ext.push_back(t[i] + shift * h);
    }
    if (ext.size() < 2) return nan;
    return 2.0 * (ext.back() - ext.front()) / static_cast<double>(ext.size() - 1);
}

// ---- output ----

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

void write_csv(const std::filesystem::path& file, const std::vector<CsvRow>& rows) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + file.string() + "' for writing");
    for (std::size_t i = 0; i < csv_columns.size(); ++i) os << (i ? "," : "") << csv_columns[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed for '" + file.string() + "'");
}

nlohmann::json config_json(const ExperimentConfig& c) {
    auto bath = [](const BathSpec& b) {
        return nlohmann::json{{"kappa", b.kappa},
                              {"gamma_c", b.gamma_c},
                              {"temperature", b.temperature},
                              {"n_matsubara", b.n_matsubara},
                              {"coupling", b.coupling == CouplingAxis::x ? "x" : "z"}};
    };
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json("auto"); };
    nlohmann::json j;
    j["mode"] = to_string(c.mode);
    j["preset"] = c.preset;
    j["pair"] = {{"T_A", c.pair.T_A},     {"T_B", c.pair.T_B},         {"Omega", c.pair.omega},
                 {"phi_v", c.pair.phi_v}, {"phi_chi", c.pair.phi_chi}, {"delta", c.pair.delta()}};
    j["bath_a"] = bath(c.resolved_bath(0));
    j["bath_b"] = bath(c.resolved_bath(1));
    j["fuel"] = {{"mode", to_string(c.fuel.mode)},
                 {"chi11", c.fuel.custom.chi11},
                 {"chi23_abs", std::abs(c.fuel.custom.chi23)},
                 {"chi23_phase", std::arg(c.fuel.custom.chi23)}};
    j["hierarchy"] = {{"depth", c.depth},
                      {"reset_ados", c.reset_ados},
                      {"cap", c.ado_cap},
                      {"ladder", c.ladder},
                      {"ladder_t_final", c.ladder_t_final}};
    j["schedule"] = {{"tau_connect", opt(c.schedule.tau_connect)},
                     {"tau_relax", c.schedule.tau_relax},
                     {"n_cycles", c.schedule.n_cycles},
                     {"tau_prethermalize", opt(c.tau_prethermalize)}};
    j["run"] = {{"dt", opt(c.dt)}, {"t_final", c.t_final}, {"output_stride", c.output_stride}};
    if (!c.sweep.param.empty())
        j["sweep"] = {{"param", c.sweep.param},
                      {"values", c.sweep.values},
                      {"base", to_string(c.sweep.base)},
                      {"max_runs", c.sweep.max_runs}};
    j["ini"] = render_config(c);
    return j;
}

nlohmann::json ladder_json(const LadderReport& r) {
    auto step = [](const LadderStep& s) {
        return nlohmann::json{
            {"depth", s.depth}, {"n_matsubara", s.n_matsubara}, {"max_dQ_A", s.max_dq_a}, {"max_dQ_B", s.max_dq_b}};
    };
    return {{"depth", r.depth},
            {"n_matsubara", {r.n_matsubara_a, r.n_matsubara_b}},
            {"t_final", r.t_final},
            {"checkpoints", {{"t", r.base.times}, {"Q_A", r.base.q_a}, {"Q_B", r.base.q_b}}},
            {"depth_plus_one", step(r.deeper)},
            {"matsubara_plus_one", step(r.matsubara)},
            {"max_change", r.max_change()}};
}

nlohmann::json write_run(const std::filesystem::path& dir, const RunOutput& run) {
    const std::string file = run.label + ".csv";
    write_csv(dir / file, run.rows);
    nlohmann::json j;
    j["label"] = run.label;
    j["file"] = file;
    j["rows"] = run.rows.size();
    j["config"] = config_json(run.config);
    j["summary"] = summary_json(run.summary);
    j["details"] = run.extra;
    return j;
}

void write_metadata(const std::filesystem::path& file, const nlohmann::json& doc) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + file.string() + "' for writing");
    os << doc.dump(2) << '\n';
    if (!os) throw std::runtime_error("write failed for '" + file.string() + "'");
}

} // namespace qcorr::experiments
