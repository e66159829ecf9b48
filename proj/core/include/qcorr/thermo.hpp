// thermo.hpp - energies, entropy productions and COP bookkeeping for the pair
//
// Heat sign: Q_k > 0 means energy has left bath k. The bath entropy change is
// then -Q_k / T_k, so
//     Sigma0 = [dS_A - Q_A/T_A] + [dS_B - Q_B/T_B]   (qubits as two systems)
//     Sigma  =  dS_AB - Q_A/T_A - Q_B/T_B              (pair as one system)
// and Sigma0 - Sigma = dI_AB.

#pragma once

#include <limits>
#include <vector>

#include "qcorr/closed_dynamics.hpp"

namespace qcorr {

struct ThermoSnapshot {
    double t = 0.0;
    double E_A = 0.0, E_B = 0.0;
    double S_A = 0.0, S_B = 0.0, S_AB = 0.0;
    double I_AB = 0.0;
    double Q_A = 0.0, Q_B = 0.0;  // cumulative
    double Sigma0 = 0.0;
    double Sigma = 0.0;
};

// Snapshot of rho0 with zero heat and zero entropy production.
ThermoSnapshot reference_snapshot(const DensityOperator& rho0, double t = 0.0);

// Entropy productions relative to `reference`. Bath temperatures are the pair's
// T_A and T_B. Throws invariant_error if the Sigma0 - Sigma = dI identity fails
// by more than 1e-10.
ThermoSnapshot snapshot(double t, const DensityOperator& rho_ab, double q_a, double q_b, const PairConfig& config,
                        const ThermoSnapshot& reference);

// Series over a sampled trajectory; reference taken from states.front().
std::vector<ThermoSnapshot> thermo_series(const std::vector<double>& times, const std::vector<DensityOperator>& states,
                                          const std::vector<double>& q_a, const std::vector<double>& q_b,
                                          const PairConfig& config);

enum class Dynamics { closed, dissipative };

struct Eq2Terms {
    double lhs = 0.0;    // (beta_A - beta_B) dE_A
    double rel_a = 0.0;  // S(rho_A(t) || rho_A(0))
    double rel_b = 0.0;
    double dI = 0.0;     // I_AB(t) - I_AB(0)

    double residual() const { return lhs - (rel_a + rel_b + dI); }
};

// Energy/entropy identity for locally thermal initial states under unitary
// evolution. Throws invariant_error for Dynamics::dissipative.
Eq2Terms eq2_decomposition(const DensityOperator& rho_t, const DensityOperator& rho0, const PairConfig& config,
                           Dynamics kind = Dynamics::closed);

// beta_k dE_k - dS_k for one qubit; equals S(rho_k(t) || rho_k(0)) >= 0 when
// rho_k(0) is Gibbs at beta_k.
double local_clausius_gap(const DensityOperator& rho_t, const DensityOperator& rho0, const PairConfig& config,
                          Subsystem which);

struct CycleRecord {
    int cycle_index = 0;
    double Q_A_cycle = 0.0;
    double Q_B_cycle = 0.0;
    double I0_injected = 0.0;
    double residual_V = 0.0;          // <V_AB> at the decouple instant
    double end_state_distance = 0.0;  // max over qubits of the trace distance to the Gibbs target
};

struct CopReport {
    double cop_ratio = 0.0;  // Q_B / (T_A I0)
    double carnot = 0.0;     // T_B / (T_A - T_B)
    bool satisfied = false;
    bool degenerate = false;  // T_A <= T_B: no finite bound, satisfied trivially
};

// With include_decoupling_work the denominator becomes T_A I0 + |residual_V|.
CopReport cop_report(const CycleRecord& cycle, double I0, const PairConfig& config,
                     bool include_decoupling_work = false);

} // namespace qcorr
