#include "qcorr/experiments/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace qcorr::experiments {

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw config_error(path + ": " + what); }

bool parse_plain_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

// Plain decimal, or [coef*]pi[/den] with an optional sign, e.g. "-pi/2", "0.25*pi".
double parse_real(const std::string& path, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    if (parse_plain_double(s, v)) {
        if (!std::isfinite(v)) fail(path, "value must be finite (got '" + s + "')");
        return v;
    }
    const auto p = s.find("pi");
    if (p != std::string::npos) {
        std::string head = s.substr(0, p);
        std::string tail = s.substr(p + 2);
        double coef = 1.0, den = 1.0;
        bool ok = true;
        if (head == "-")
            coef = -1.0;
        else if (!head.empty() && head != "+") {
            if (head.back() != '*') ok = false;
            else ok = parse_plain_double(head.substr(0, head.size() - 1), coef);
        }
        if (ok && !tail.empty()) ok = tail.front() == '/' && parse_plain_double(tail.substr(1), den) && den != 0.0;
        if (ok) return coef * pi / den;
    }
    fail(path, "expected a real number (got '" + s + "')");
}

long long parse_integer(const std::string& path, const std::string& raw) {
    const std::string s = trim(raw);
    long long v = 0;
    const char* first = s.data();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        fail(path, "expected an integer (got '" + s + "')");
    return v;
}

bool parse_bool(const std::string& path, const std::string& raw) {
    std::string s = trim(raw);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    fail(path, "expected true or false (got '" + s + "')");
}

std::vector<double> parse_list(const std::string& path, const std::string& raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) fail(path, "empty list entry at position " + std::to_string(i));
        out.push_back(parse_real(path + "[" + std::to_string(i) + "]", item));
        ++i;
    }
    return out;
}

std::optional<double> parse_auto_real(const std::string& path, const std::string& raw) {
    if (trim(raw) == "auto") return std::nullopt;
    return parse_real(path, raw);
}

CouplingAxis parse_axis(const std::string& path, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "x") return CouplingAxis::x;
    if (s == "z") return CouplingAxis::z;
    fail(path, "expected x or z (got '" + s + "')");
}

FuelMode parse_fuel(const std::string& path, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "optimal") return FuelMode::optimal;
    if (s == "none") return FuelMode::none;
    if (s == "custom") return FuelMode::custom;
    fail(path, "expected optimal, none or custom (got '" + s + "')");
}

std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

// ---- key table ----

using Setter = std::function<void(ExperimentConfig&, const std::string& path, const std::string& value)>;

BathSpec& bath_ref(ExperimentConfig& c, int k) { return k == 0 ? c.bath_a : c.bath_b; }

void set_chi23(ExperimentConfig& c, double abs_v, double phase) { c.fuel.custom.chi23 = std::polar(abs_v, phase); }

const std::map<std::string, std::map<std::string, Setter>>& key_table() {
    static const auto table = [] {
        std::map<std::string, std::map<std::string, Setter>> t;
        auto& pair = t["pair"];
        pair["T_A"] = [](auto& c, auto& p, auto& v) { c.pair.T_A = parse_real(p, v); };
        pair["T_B"] = [](auto& c, auto& p, auto& v) { c.pair.T_B = parse_real(p, v); };
        pair["Omega"] = [](auto& c, auto& p, auto& v) { c.pair.omega = parse_real(p, v); };
        pair["phi_v"] = [](auto& c, auto& p, auto& v) { c.pair.phi_v = parse_real(p, v); };
        pair["phi_chi"] = [](auto& c, auto& p, auto& v) { c.pair.phi_chi = parse_real(p, v); };
        pair["delta"] = [](auto& c, auto& p, auto& v) { c.pair.phi_chi = c.pair.phi_v - parse_real(p, v); };

        for (int k = 0; k < 2; ++k) {
            auto& bath = t[k == 0 ? "bath_a" : "bath_b"];
            bath["kappa"] = [k](auto& c, auto& p, auto& v) { bath_ref(c, k).kappa = parse_real(p, v); };
            bath["gamma_c"] = [k](auto& c, auto& p, auto& v) { bath_ref(c, k).gamma_c = parse_real(p, v); };
            bath["n_matsubara"] = [k](auto& c, auto& p, auto& v) {
                const auto n = parse_integer(p, v);
                if (n < 0 || n > 16) fail(p, "must be in [0, 16] (got " + std::to_string(n) + ")");
                bath_ref(c, k).n_matsubara = static_cast<int>(n);
            };
            bath["coupling"] = [k](auto& c, auto& p, auto& v) { bath_ref(c, k).coupling = parse_axis(p, v); };
        }

        auto& fuel = t["fuel"];
        fuel["mode"] = [](auto& c, auto& p, auto& v) { c.fuel.mode = parse_fuel(p, v); };
        fuel["chi11"] = [](auto& c, auto& p, auto& v) { c.fuel.custom.chi11 = parse_real(p, v); };
        fuel["chi23_abs"] = [](auto& c, auto& p, auto& v) {
            set_chi23(c, parse_real(p, v), std::arg(c.fuel.custom.chi23));
        };
        fuel["chi23_phase"] = [](auto& c, auto& p, auto& v) {
            set_chi23(c, std::abs(c.fuel.custom.chi23), parse_real(p, v));
        };

        auto& h = t["hierarchy"];
        h["depth"] = [](auto& c, auto& p, auto& v) {
            const auto n = parse_integer(p, v);
            if (n < 1 || n > 32) fail(p, "must be in [1, 32] (got " + std::to_string(n) + ")");
            c.depth = static_cast<int>(n);
        };
        h["reset_ados"] = [](auto& c, auto& p, auto& v) { c.reset_ados = parse_bool(p, v); };
        h["cap"] = [](auto& c, auto& p, auto& v) {
            const auto n = parse_integer(p, v);
            if (n < 1) fail(p, "must be >= 1 (got " + std::to_string(n) + ")");
            c.ado_cap = static_cast<std::size_t>(n);
        };
        h["ladder"] = [](auto& c, auto& p, auto& v) { c.ladder = parse_bool(p, v); };
        h["ladder_t_final"] = [](auto& c, auto& p, auto& v) { c.ladder_t_final = parse_real(p, v); };

        auto& s = t["schedule"];
        s["tau_connect"] = [](auto& c, auto& p, auto& v) { c.schedule.tau_connect = parse_auto_real(p, v); };
        s["tau_relax"] = [](auto& c, auto& p, auto& v) { c.schedule.tau_relax = parse_real(p, v); };
        s["n_cycles"] = [](auto& c, auto& p, auto& v) {
            const auto n = parse_integer(p, v);
            if (n < 1 || n > 10000) fail(p, "must be in [1, 10000] (got " + std::to_string(n) + ")");
            c.schedule.n_cycles = static_cast<int>(n);
        };
        s["tau_prethermalize"] = [](auto& c, auto& p, auto& v) { c.tau_prethermalize = parse_auto_real(p, v); };

        auto& r = t["run"];
        r["dt"] = [](auto& c, auto& p, auto& v) { c.dt = parse_auto_real(p, v); };
        r["t_final"] = [](auto& c, auto& p, auto& v) { c.t_final = parse_real(p, v); };
        r["output_stride"] = [](auto& c, auto& p, auto& v) {
            const auto n = parse_integer(p, v);
            if (n < 1) fail(p, "must be >= 1 (got " + std::to_string(n) + ")");
            c.output_stride = static_cast<int>(n);
        };

        auto& sw = t["sweep"];
        sw["param"] = [](auto& c, auto&, auto& v) { c.sweep.param = trim(v); };
        sw["values"] = [](auto& c, auto& p, auto& v) { c.sweep.values = parse_list(p, v); };
        sw["base"] = [](auto& c, auto& p, auto& v) {
            const std::string s = trim(v);
            if (s != "closed" && s != "open" && s != "pump") fail(p, "expected closed, open or pump (got '" + s + "')");
            c.sweep.base = parse_mode(s);
        };
        sw["max_runs"] = [](auto& c, auto& p, auto& v) {
            const auto n = parse_integer(p, v);
            if (n < 1) fail(p, "must be >= 1 (got " + std::to_string(n) + ")");
            c.sweep.max_runs = static_cast<int>(n);
        };
        return t;
    }();
    return table;
}

// Keys that can be swept: every numeric entry of the table.
const std::set<std::string>& scalar_paths() {
    static const std::set<std::string> s = {
        "pair.T_A", "pair.T_B", "pair.Omega", "pair.phi_v", "pair.phi_chi", "pair.delta",
        "bath_a.kappa", "bath_a.gamma_c", "bath_a.n_matsubara", "bath_b.kappa", "bath_b.gamma_c",
        "bath_b.n_matsubara", "fuel.chi11", "fuel.chi23_abs", "fuel.chi23_phase", "hierarchy.depth",
        "schedule.tau_connect", "schedule.tau_relax", "schedule.n_cycles", "run.dt", "run.t_final",
        "run.output_stride"};
    return s;
}

} // namespace

// ---- names ----

Mode parse_mode(const std::string& name) {
    if (name == "closed") return Mode::closed;
    if (name == "open") return Mode::open;
    if (name == "pump") return Mode::pump;
    if (name == "sweep") return Mode::sweep;
    if (name == "preset") return Mode::preset;
    throw config_error("mode: expected closed, open, pump, sweep or preset (got '" + name + "')");
}

std::string to_string(Mode m) {
    switch (m) {
    case Mode::closed: return "closed";
    case Mode::open: return "open";
    case Mode::pump: return "pump";
    case Mode::sweep: return "sweep";
    case Mode::preset: return "preset";
    }
    return "?";
}

std::string to_string(FuelMode m) {
    switch (m) {
    case FuelMode::none: return "none";
    case FuelMode::optimal: return "optimal";
    case FuelMode::custom: return "custom";
    }
    return "?";
}

// ---- ExperimentConfig ----

void ExperimentConfig::sync() {
    bath_a.temperature = pair.T_A;
    bath_b.temperature = pair.T_B;
    schedule.chi = fuel;
}

BathSpec ExperimentConfig::resolved_bath(int k) const {
    BathSpec b = k == 0 ? bath_a : bath_b;
    b.temperature = k == 0 ? pair.T_A : pair.T_B;
    return b;
}

HeomOptions ExperimentConfig::heom_options() const {
    HeomOptions o;
    o.ado_cap = ado_cap;
    return o;
}

void ExperimentConfig::validate() const {
    auto positive = [](const std::string& path, double v) {
        if (!(std::isfinite(v) && v > 0.0)) fail(path, "must be > 0 (got " + fmt(v) + ")");
    };
    positive("pair.T_A", pair.T_A);
    positive("pair.T_B", pair.T_B);
    positive("pair.Omega", pair.omega);
    if (!std::isfinite(pair.phi_v)) fail("pair.phi_v", "must be finite");
    if (!std::isfinite(pair.phi_chi)) fail("pair.phi_chi", "must be finite");
    for (int k = 0; k < 2; ++k) {
        const std::string sec = k == 0 ? "bath_a" : "bath_b";
        const BathSpec& b = k == 0 ? bath_a : bath_b;
        if (!(std::isfinite(b.kappa) && b.kappa >= 0.0)) fail(sec + ".kappa", "must be >= 0 (got " + fmt(b.kappa) + ")");
        positive(sec + ".gamma_c", b.gamma_c);
    }
    if (dt) positive("run.dt", *dt);
    if (!(std::isfinite(t_final) && t_final >= 0.0)) fail("run.t_final", "must be >= 0 (got " + fmt(t_final) + ")");
    if (output_stride < 1) fail("run.output_stride", "must be >= 1");
    positive("hierarchy.ladder_t_final", ladder_t_final);
    if (schedule.tau_connect) positive("schedule.tau_connect", *schedule.tau_connect);
    positive("schedule.tau_relax", schedule.tau_relax);
    if (tau_prethermalize && !(std::isfinite(*tau_prethermalize) && *tau_prethermalize >= 0.0))
        fail("schedule.tau_prethermalize", "must be >= 0");

    if (fuel.mode == FuelMode::custom && !fuel.custom.feasible(lambda_weights(pair)))
        fail("fuel.chi23_abs", "custom chi violates positivity of the initial state (chi11 = " +
                                   fmt(fuel.custom.chi11) + ", |chi23| = " + fmt(std::abs(fuel.custom.chi23)) + ")");

    if (mode == Mode::sweep) {
        if (sweep.param.empty()) fail("sweep.param", "missing required key");
        if (sweep.values.empty()) fail("sweep.values", "empty grid");
        if (!scalar_paths().contains(sweep.param))
            fail("sweep.param", "'" + sweep.param + "' is not a sweepable numeric key");
    }
}

// ---- presets ----

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.pair = PairConfig{};  // T_A = 2, T_B = 1, Omega = 0.1, delta = -pi/2
    c.bath_a = BathSpec{0.01, 1.0, c.pair.T_A, 2, CouplingAxis::x};
    c.bath_b = BathSpec{0.01, 1.0, c.pair.T_B, 2, CouplingAxis::x};
    c.schedule.tau_relax = 500.0;
    c.schedule.n_cycles = 2;
    c.sync();
    return c;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5"}; }

namespace {

// Bath cutoff and hierarchy used by the dissipative presets.
void preset_hierarchy(ExperimentConfig& c) {
    c.bath_a.gamma_c = c.bath_b.gamma_c = 0.2;
    c.bath_a.n_matsubara = c.bath_b.n_matsubara = 1;
    c.depth = 5;
}

} // namespace

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c = default_config();
    c.preset = name;
    if (name == "fig1" || name == "fig2") {
        c.mode = Mode::closed;
        c.dt = 0.01;
        c.t_final = 2.0 * pi / c.pair.omega;
        c.output_stride = 10;
    } else if (name == "fig3" || name == "fig4") {
        c.mode = Mode::open;
        preset_hierarchy(c);
        c.t_final = 100.0;
        c.output_stride = 25;
        c.ladder = true;
    } else if (name == "fig5") {
        c.mode = Mode::pump;
        preset_hierarchy(c);
        c.bath_b.kappa = 0.023;
        c.schedule.tau_connect = 6.1;
        c.schedule.tau_relax = 500.0;
        c.schedule.n_cycles = 2;
        c.output_stride = 250;
        c.ladder = true;
    } else {
        throw config_error("preset: unknown preset '" + name + "' (expected fig1..fig5)");
    }
    c.sync();
    return c;
}

// ---- parsing ----

ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw config_error("config: line " + std::to_string(e.line()) + ": " + e.message());
    }

    ExperimentConfig cfg = base;
    if (auto p = tree.get_child_optional("preset"); p && p->empty()) {
        const Mode mode = base.mode;
        cfg = preset_config(trim(p->data()));
        cfg.mode = mode;
    }

    const auto& table = key_table();
    for (const auto& [section, node] : tree) {
        if (node.empty()) {
            if (section == "preset") continue;
            fail(section, "unknown top-level key");
        }
        const auto sec = table.find(section);
        if (sec == table.end()) fail(section, "unknown section");
        bool saw_delta = false, saw_phi_chi = false;
        for (const auto& [key, value] : node) {
            const std::string path = section + "." + key;
            const auto setter = sec->second.find(key);
            if (setter == sec->second.end()) fail(path, "unknown key");
            if (section == "pair" && key == "delta") saw_delta = true;
            if (section == "pair" && key == "phi_chi") saw_phi_chi = true;
            if (saw_delta && saw_phi_chi) fail(path, "set either pair.delta or pair.phi_chi, not both");
            setter->second(cfg, path, value.data());
        }
        // delta is phi_v - phi_chi regardless of key order.
        if (saw_delta && section == "pair") {
            const auto d = node.get<std::string>("delta");
            cfg.pair.phi_chi = cfg.pair.phi_v - parse_real("pair.delta", d);
        }
    }
    cfg.source = text;
    cfg.sync();
    cfg.validate();
    return cfg;
}

void set_scalar(ExperimentConfig& cfg, const std::string& path, double value) {
    if (!scalar_paths().contains(path)) fail(path, "not a sweepable numeric key");
    const auto dot = path.find('.');
    const auto& setter = key_table().at(path.substr(0, dot)).at(path.substr(dot + 1));
    setter(cfg, path, fmt(value));
    cfg.sync();
}

std::string render_config(const ExperimentConfig& c) {
    std::ostringstream os;
    auto axis = [](CouplingAxis a) { return a == CouplingAxis::x ? "x" : "z"; };
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("auto"); };
    if (!c.preset.empty()) os << "preset = " << c.preset << "\n";
    os << "[pair]\nT_A = " << fmt(c.pair.T_A) << "\nT_B = " << fmt(c.pair.T_B) << "\nOmega = " << fmt(c.pair.omega)
       << "\nphi_v = " << fmt(c.pair.phi_v) << "\nphi_chi = " << fmt(c.pair.phi_chi) << "\n";
    for (int k = 0; k < 2; ++k) {
        const BathSpec& b = k == 0 ? c.bath_a : c.bath_b;
        os << (k == 0 ? "[bath_a]" : "[bath_b]") << "\nkappa = " << fmt(b.kappa) << "\ngamma_c = " << fmt(b.gamma_c)
           << "\nn_matsubara = " << b.n_matsubara << "\ncoupling = " << axis(b.coupling) << "\n";
    }
    os << "[fuel]\nmode = " << to_string(c.fuel.mode) << "\nchi11 = " << fmt(c.fuel.custom.chi11)
       << "\nchi23_abs = " << fmt(std::abs(c.fuel.custom.chi23)) << "\nchi23_phase = " << fmt(std::arg(c.fuel.custom.chi23))
       << "\n";
    os << "[hierarchy]\ndepth = " << c.depth << "\nreset_ados = " << (c.reset_ados ? "true" : "false")
       << "\ncap = " << c.ado_cap << "\nladder = " << (c.ladder ? "true" : "false")
       << "\nladder_t_final = " << fmt(c.ladder_t_final) << "\n";
    os << "[schedule]\ntau_connect = " << opt(c.schedule.tau_connect) << "\ntau_relax = " << fmt(c.schedule.tau_relax)
       << "\nn_cycles = " << c.schedule.n_cycles << "\ntau_prethermalize = " << opt(c.tau_prethermalize) << "\n";
    os << "[run]\ndt = " << opt(c.dt) << "\nt_final = " << fmt(c.t_final) << "\noutput_stride = " << c.output_stride
       << "\n";
    if (!c.sweep.param.empty()) {
        os << "[sweep]\nparam = " << c.sweep.param << "\nvalues = ";
        for (std::size_t i = 0; i < c.sweep.values.size(); ++i) os << (i ? ", " : "") << fmt(c.sweep.values[i]);
        os << "\nbase = " << to_string(c.sweep.base) << "\nmax_runs = " << c.sweep.max_runs << "\n";
    }
    return os.str();
}

} // namespace qcorr::experiments
