// closed_dynamics.hpp - correlated two-qubit fuel state, unitary evolution and
// its closed-form solution
//
// Both qubits carry H = diag(-1/2, 1/2) in {|0>, |1>} (hbar*omega = 1, k_B = 1,
// times in 1/omega).
// The pair interacts through
//     V = Omega (e^{i phi_v} |01><10| + e^{-i phi_v} |10><01|).

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qcorr/qstate.hpp"

namespace qcorr {

struct PairConfig {
    double T_A = 2.0;
    double T_B = 1.0;
    double omega = 0.1;                   // coupling magnitude Omega
    double phi_v = 0.0;                   // phase of the coupling operator
    double phi_chi = 1.5707963267948966;  // phase of the initial |01>,|10> coherence

    double beta_a() const { return 1.0 / T_A; }
    double beta_b() const { return 1.0 / T_B; }

    // phi_v - phi_chi wrapped into (-pi, pi].
    double delta() const;

    // Throws invariant_error unless T_A, T_B, omega are strictly positive and finite.
    void validate() const;

    // Same temperatures and coupling, phi_v = 0 and phi_chi = -delta.
    static PairConfig with_delta(double delta, double T_A = 2.0, double T_B = 1.0, double omega = 0.1);
};

// Diagonal of rho_A^0 (x) rho_B^0 in the product basis.
struct LambdaWeights {
    double l1 = 0.25, l2 = 0.25, l3 = 0.25, l4 = 0.25;

    double sum() const { return l1 + l2 + l3 + l4; }
};

// Traceless-marginal correlation matrix
//     diag(chi11, -chi11, -chi11, chi11) + chi23 |01><10| + h.c.
struct CorrelationMatrix {
    double chi11 = 0.0;
    cplx chi23{0.0, 0.0};

    ComplexMatrix matrix() const;

    // Positivity region: min(l2, l3) >= chi11 >= -l4 and
    // sqrt((l2 - chi11)(l3 - chi11)) >= |chi23|, both up to tol.
    bool feasible(const LambdaWeights& w, double tol = 1e-12) const;
};

struct SedTrace {
    std::vector<double> times;
    std::vector<double> sed;
    std::vector<double> concurrence;
    std::vector<double> mutual_information;
};

// --------------------------- Hamiltonians -------------------------------------

// diag(-1/2, 1/2): ground |0>, excited |1>.
HermitianObservable qubit_hamiltonian();
// H_A (x) I or I (x) H_B.
HermitianObservable local_hamiltonian(Subsystem which);
HermitianObservable interaction_hamiltonian(const PairConfig& config);
// H_A + H_B + V_AB.
HermitianObservable pair_hamiltonian(const PairConfig& config);

double subsystem_energy(const DensityOperator& rho_ab, Subsystem which);
// E_A - E_B.
double sed(const DensityOperator& rho_ab);

// --------------------------- Fuel state ---------------------------------------

LambdaWeights lambda_weights(const PairConfig& config);
// Gibbs product weights for arbitrary local inverse temperatures.
LambdaWeights lambda_weights(double beta_a, double beta_b);
// Weights read off the diagonal of a product of two qubit marginals.
LambdaWeights lambda_weights(const DensityOperator& rho_a, const DensityOperator& rho_b);

DensityOperator gibbs_product(const PairConfig& config);

// chi11 = -l4, |chi23| = sqrt(l4), arg chi23 = phi_chi.
CorrelationMatrix optimal_chi(const PairConfig& config);
CorrelationMatrix optimal_chi(const LambdaWeights& w, double phi_chi);

// rho_A^0 (x) rho_B^0 + chi. Throws feasibility_error outside the positivity region.
DensityOperator correlated_state(const PairConfig& config, const CorrelationMatrix& chi);

// 2 sqrt(l4).
double optimal_concurrence(const PairConfig& config);

struct ConcurrenceSearch {
    double c_max = 0.0;
    CorrelationMatrix chi;
};

// Exhaustive search over (chi11, |chi23|^2) on a grid_n x grid_n lattice spanning
// the feasible region. If fixed_chi11 is given only that slice is searched.
ConcurrenceSearch brute_force_max_concurrence(const PairConfig& config, int grid_n,
                                              std::optional<double> fixed_chi11 = std::nullopt);

// --------------------------- Energy exchange ----------------------------------

// Delta_AB(0) = [tanh(beta_B/2) - tanh(beta_A/2)] / 2.
double initial_sed(const PairConfig& config);

// -i Tr{(H_A - H_B)[V_AB, chi]}.
double initial_sed_slope(const PairConfig& config, const CorrelationMatrix& chi);

// theta = atan(C0 sin(delta) / Delta_AB(0)); the +-pi/2 limit when Delta_AB(0) = 0.
double sed_phase(const PairConfig& config);

// Time of the first SED maximum for t >= 0 of the optimal-chi closed solution.
// Equals |theta| / (2 Omega) when Delta_AB(0) > 0 and theta <= 0.
double first_sed_maximum_time(const PairConfig& config);

// Closed-form rho(t) for the optimal-chi initial state.
DensityOperator exact_closed_state(const PairConfig& config, double t);

// Closed-form Delta_AB(t) for the optimal-chi initial state.
double exact_sed(const PairConfig& config, double t);

struct ClosedRun {
    SedTrace trace;
    std::vector<DensityOperator> states;  // one per trace sample
};

// Fixed-step RK4 integration of i d(rho)/dt = [H, rho]. Samples every
// output_stride steps (t = 0 included). The config overload requires
// dt <= 0.01 / Omega; the Hamiltonian overload requires dt * ||H||_2 <= 0.1.
ClosedRun integrate_lvn(const PairConfig& config, const DensityOperator& rho0, double dt,
                        double t_final, int output_stride = 1);
ClosedRun integrate_lvn(const HermitianObservable& hamiltonian, const DensityOperator& rho0,
                        double dt, double t_final, int output_stride = 1);

} // namespace qcorr
