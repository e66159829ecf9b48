// pump.hpp - four-stroke correlation-fuelled heat pump on the HEOM hierarchy
//
// Stroke a: the uncoupled qubits thermalize with their baths.
// Stroke b: the correlation chi is written onto the pair (fuel injection).
// Stroke c: V_AB is switched on for tau_connect.
// Stroke d: V_AB is switched off and the qubits relax for tau_relax.
// Every stroke keeps both baths attached.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qcorr/heom.hpp"
#include "qcorr/thermo.hpp"

namespace qcorr {

enum class FuelMode { none, optimal, custom };

struct ChiMode {
    FuelMode mode = FuelMode::optimal;
    CorrelationMatrix custom;  // used only when mode == custom
};

struct CycleSchedule {
    std::optional<double> tau_connect;  // empty = refine from the closed-system estimate
    double tau_relax = 500.0;
    int n_cycles = 2;
    ChiMode chi;

    // Throws invariant_error on non-positive windows or n_cycles < 1.
    void validate() const;
};

struct PumpOptions {
    double dt = 0.0;                      // 0 = the model's max_step()
    int output_stride = 100;
    bool reset_ados = false;              // zero tiers >= 1 at each injection
    bool include_decoupling_work = false; // add |<V_AB>| at detachment to the COP denominator
    std::optional<double> tau_prethermalize;  // stroke a before the first cycle; default tau_relax
    double gibbs_tolerance = 1e-4;        // trace distance for "rethermalized"
    HeomOptions heom;
};

// ---- strokes ----

struct Injection {
    HierarchyState state;
    double I0 = 0.0;
    std::optional<std::string> warning;
};

// Replaces ADO(0) by rho_A (x) rho_B + chi, where rho_A, rho_B are the current
// marginals and lambda is read from their diagonals. Optimal chi uses the pair's
// phi_chi. With reset_ados all higher tiers are zeroed; the interaction energy
// they carried is moved into system_heat so the heat ledger stays continuous.
// `targets` (optional) are the Gibbs marginals the pair is expected to sit in.
Injection inject_correlation(HierarchyState state, const ChiMode& chi, bool reset_ados = false,
                             const std::array<DensityOperator, 2>* targets = nullptr, double target_tol = 1e-4);

// <V_AB> at the decouple instant.
double decouple_cost(const HierarchyState& state);

struct TauRefinement {
    double formula = 0.0;  // closed-system first SED maximum
    double grid = 0.0;     // first interior SED maximum on the integration grid
    double refined = 0.0;  // golden-section refinement between the grid neighbours
    double sed_max = 0.0;
};

// Propagates a copy of `injected` with V_AB on over one closed-system period
// pi/Omega and locates the first SED maximum of the dissipative trajectory.
TauRefinement refine_tau_connect(const HierarchyState& injected, double dt);

// ---- full run ----

struct PumpRun {
    std::vector<CycleRecord> cycles;
    HeatLedger ledger;  // cumulative from the first injection
    SedTrace trace;
    std::vector<DensityOperator> states;
    std::vector<int> cycle_of_sample;
    double tau_connect = 0.0;
    std::optional<TauRefinement> refinement;
    std::array<DensityOperator, 2> targets{DensityOperator::maximally_mixed(2), DensityOperator::maximally_mixed(2)};
    std::vector<std::string> warnings;
    HierarchyState final_state;
};

// Throws numerical_error if the marginals move away from their targets during a
// relaxation stroke and end further than gibbs_tolerance from them.
PumpRun run_pump(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b,
                 const CycleSchedule& schedule, int depth, const PumpOptions& options = {});

} // namespace qcorr
