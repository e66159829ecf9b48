// config.hpp - experiment configuration: strict INI parsing and figure presets
//
// Layout (every key optional, unknown sections or keys are errors):
//
//   preset = fig5                  ; start from a preset, then apply the sections below
//   [pair]      T_A T_B Omega phi_v phi_chi | delta
//   [bath_a]    kappa gamma_c n_matsubara coupling (x|z)
//   [bath_b]    same as bath_a
//   [fuel]      mode (optimal|none|custom) chi11 chi23_abs chi23_phase
//   [hierarchy] depth reset_ados cap ladder ladder_t_final
//   [schedule]  tau_connect (auto|number) tau_relax n_cycles tau_prethermalize
//   [run]       dt (auto|number) t_final output_stride
//   [sweep]     param values base max_runs
//
// Bath temperatures always follow [pair] T_A and T_B.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorr/pump.hpp"

namespace qcorr::experiments {

// Exit code 2: malformed, unknown or out-of-range configuration.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { closed, open, pump, sweep, preset };

Mode parse_mode(const std::string& name);
std::string to_string(Mode m);
std::string to_string(FuelMode m);

struct SweepSpec {
    std::string param;          // "section.key", any numeric scalar
    std::vector<double> values;
    Mode base = Mode::open;     // closed | open | pump
    int max_runs = 256;
};

struct ExperimentConfig {
    Mode mode = Mode::open;
    std::string preset;

    PairConfig pair;
    BathSpec bath_a;
    BathSpec bath_b;

    int depth = 3;
    bool reset_ados = false;
    std::size_t ado_cap = 200000;
    bool ladder = false;
    double ladder_t_final = 50.0;

    ChiMode fuel;  // initial correlation for closed/open runs, injected chi for pump runs
    CycleSchedule schedule;
    std::optional<double> tau_prethermalize;

    std::optional<double> dt;  // empty = automatic (the resolution guard)
    double t_final = 100.0;
    int output_stride = 25;

    SweepSpec sweep;

    std::string source;  // raw INI text, kept for the metadata

    // Copies pair temperatures into the baths and the fuel into the schedule.
    void sync();
    // Range checks with path-qualified messages; throws config_error.
    void validate() const;

    BathSpec resolved_bath(int k) const;
    HeomOptions heom_options() const;
};

// Reference configuration (Omega = 0.1, delta = -pi/2, T_A = 2, T_B = 1, kappa = 0.01).
ExperimentConfig default_config();

// fig1 .. fig5. Throws config_error for unknown names.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Parses INI text. A top-level `preset` key selects the starting point,
// otherwise `base` is used.
ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base = default_config());

// Sets one numeric scalar addressed as "section.key" (used by sweeps).
void set_scalar(ExperimentConfig& cfg, const std::string& path, double value);

// Canonical INI rendering of every resolved parameter.
std::string render_config(const ExperimentConfig& cfg);

} // namespace qcorr::experiments
