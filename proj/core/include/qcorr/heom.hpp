// heom.hpp - hierarchical equations of motion for the qubit pair, each qubit
// coupled to its own Drude-Lorentz bosonic bath
//
// Bath k couples through Q_k (x) X_k with Q_k = sigma_x (default) or sigma_z on
// qubit k. Its spectral density is J(w) = 2 kappa gamma_c w / (gamma_c^2 + w^2),
// and the correlation function <X(t) X(0)> is expanded as
//     C(t) = sum_j c_j exp(-nu_j t) + 2 Delta delta(t),
// with the Drude pole nu_0 = gamma_c, c_0 = kappa gamma_c [cot(gamma_c/2T) - i],
// Matsubara poles nu_j = 2 pi j T, c_j = 4 kappa gamma_c nu_j T / (nu_j^2 - gamma_c^2),
// and the time-local remainder Delta = sum_{j>K} c_j / nu_j.
//
// Auxiliary density operators (ADOs) are stored rescaled by
// sqrt(prod_j n_j! s_j^{n_j}), s_j = sqrt|c_j|, which keeps every tier O(1).
//
// Heat Q_k is the energy that has left bath k. It is evaluated exactly from the
// hierarchy as
//     Q_k(t) = int_0^t -i Tr([H_S, Q_k] sigma_k) dt' + Tr(Q_k sigma_k)(t) - Tr(Q_k sigma_k)(0),
// where sigma_k = Tr_B(X_k rho_total) is the sum of the first-tier ADOs of bath k.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qcorr/closed_dynamics.hpp"

namespace qcorr {

using Mat4 = Eigen::Matrix4cd;

enum class CouplingAxis { x, z };

struct BathSpec {
    double kappa = 0.01;     // system-bath coupling (reorganization energy)
    double gamma_c = 1.0;    // Drude cutoff frequency
    double temperature = 1.0;
    int n_matsubara = 2;     // K
    CouplingAxis coupling = CouplingAxis::x;

    // kappa may be 0 (decoupled bath); everything else strictly positive.
    void validate() const;
};

struct ExponentialTerm {
    cplx coefficient;
    double rate;
};

struct BathDecomposition {
    std::vector<ExponentialTerm> terms;  // Drude pole first, then Matsubara j = 1..K
    double remainder = 0.0;              // Delta
};

BathDecomposition drude_lorentz_decomposition(const BathSpec& bath);

std::size_t hierarchy_size(int n_modes, int depth);

// Multi-indices n = (n_1..n_M) with |n| <= depth, stored tier by tier.
class HierarchyIndex {
public:
    HierarchyIndex(int n_modes, int depth, std::size_t cap = 200000);

    int n_modes() const noexcept { return n_modes_; }
    int depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return tiers_.size(); }

    std::span<const std::uint8_t> multi_index(std::size_t ado) const;
    int tier(std::size_t ado) const { return tiers_[ado]; }

    // Offset of n + e_mode (or n - e_mode); -1 if outside the hierarchy.
    std::ptrdiff_t raised(std::size_t ado, int mode) const { return up_[ado * n_modes_ + mode]; }
    std::ptrdiff_t lowered(std::size_t ado, int mode) const { return down_[ado * n_modes_ + mode]; }

    // Throws std::out_of_range if the multi-index is not in the hierarchy.
    std::size_t offset_of(std::span<const int> n) const;

private:
    int n_modes_;
    int depth_;
    std::vector<std::uint8_t> indices_;
    std::vector<int> tiers_;
    std::vector<std::ptrdiff_t> up_;
    std::vector<std::ptrdiff_t> down_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

struct HeomOptions {
    std::size_t ado_cap = 200000;
    bool matsubara_remainder = true;  // add -Delta [Q,[Q,.]] for the dropped Matsubara poles
    bool markovian_closure = true;    // adiabatic closure of tier depth+1
};

// Immutable generator of the hierarchy. Shared by every state built from it.
class HeomModel {
public:
    HeomModel(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b, int depth,
              const HeomOptions& options = {});

    const PairConfig& config() const noexcept { return config_; }
    const BathSpec& bath(int k) const { return baths_[static_cast<std::size_t>(k)]; }
    const HierarchyIndex& index() const noexcept { return index_; }
    const HeomOptions& options() const noexcept { return options_; }
    int n_modes() const noexcept { return static_cast<int>(modes_.size()); }

    const Mat4& free_hamiltonian() const noexcept { return h_free_; }
    const Mat4& interaction() const noexcept { return v_ab_; }
    const Mat4& coupling_operator(int k) const { return q_[static_cast<std::size_t>(k)]; }
    Mat4 system_hamiltonian(bool coupled) const { return coupled ? Mat4(h_free_ + v_ab_) : h_free_; }

    // Largest dt allowed by min(0.01/Omega, 0.1/gamma_c, 0.1/nu_K) over both baths.
    double max_step() const noexcept { return max_step_; }

    // d(ados)/dt; heat_rate receives -i Tr([H_S, Q_k] sigma_k) per bath.
    void derivative(std::span<const Mat4> ados, bool coupled, std::span<Mat4> out,
                    std::array<double, 2>& heat_rate) const;

    // sigma_k = Tr_B(X_k rho_total), including the time-local remainder.
    Mat4 bath_moment(std::span<const Mat4> ados, int k) const;

private:
    struct Mode {
        int bath;
        cplx coefficient;
        double rate;
        double scale;  // s_j
    };

    void derivative_range(std::span<const Mat4> ados, const Mat4& h, std::span<Mat4> out, std::size_t begin,
                          std::size_t end) const;

    PairConfig config_;
    std::array<BathSpec, 2> baths_;
    HeomOptions options_;
    HierarchyIndex index_;
    std::vector<Mode> modes_;
    std::array<double, 2> remainder_{};
    std::array<Mat4, 2> q_;
    Mat4 h_free_;
    Mat4 v_ab_;
    double max_step_ = 0.0;

    // Per (ado, mode) coefficients, flattened ado * n_modes + mode.
    std::vector<double> damping_;      // sum_j n_j nu_j, per ado
    std::vector<cplx> up_coef_;        // -i sqrt(n_j+1) s_j
    std::vector<cplx> down_coef_;      // -i sqrt(n_j) c_j / s_j
    std::vector<cplx> down_coef_conj_; // -i sqrt(n_j) conj(c_j) / s_j
    // Per (ado, bath): combined Markovian closure and remainder strength a, entering
    // as -[Q, a Q rho - conj(a) rho Q].
    std::vector<cplx> closure_;
};

struct HierarchyState {
    std::shared_ptr<const HeomModel> model;
    std::vector<Mat4> ados;               // ados[0] is the physical rho_AB
    double time = 0.0;
    bool coupled = true;                  // qubit-qubit interaction V_AB switched on
    std::array<double, 2> system_heat{};  // int -i Tr([H_S, Q_k] sigma_k) dt

    const HierarchyIndex& index() const { return model->index(); }
    int depth() const { return model->index().depth(); }

    // Hermitian part of ADO(0), validated with StateTolerance::relaxed().
    DensityOperator reduced_state() const;
};

// ADO(0) = rho0, all other ADOs zero. Throws resource_error above options.ado_cap.
HierarchyState build_hierarchy(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b,
                               int depth, const DensityOperator& rho0, const HeomOptions& options = {});

// Owns RK4 scratch space for repeated steps on one model.
class HeomStepper {
public:
    HeomStepper() = default;

    // Throws step_size_error above model.max_step(), numerical_error on NaN/overflow.
    void step(HierarchyState& state, double dt);

    // Advance by exactly `duration` using equal steps of size <= dt.
    void advance(HierarchyState& state, double duration, double dt);

private:
    void ensure(std::size_t n);

    std::vector<Mat4> k1_, k2_, k3_, k4_, tmp_;
};

HierarchyState heom_step(HierarchyState state, double dt);

struct HeatCurrents {
    double bath_a = 0.0;  // dQ_A/dt, positive = energy leaving bath A
    double bath_b = 0.0;
};

HeatCurrents heat_currents(const HierarchyState& state);

// Tr(Q_k sigma_k): the system-bath interaction energy of bath k.
double interaction_energy(const HierarchyState& state, int k);

// system_heat + interaction energy. Q_k(t) = bath_energy_loss(t) - bath_energy_loss(0).
std::array<double, 2> bath_energy_loss(const HierarchyState& state);

// <V_AB> if the qubit coupling is on, else 0.
double qubit_interaction_energy(const HierarchyState& state);

struct HeatLedger {
    std::vector<double> times;
    std::vector<double> q_a;
    std::vector<double> q_b;
    std::vector<double> e_int;  // <V_AB>

    void append(double t, double qa, double qb, double v) {
        times.push_back(t);
        q_a.push_back(qa);
        q_b.push_back(qb);
        e_int.push_back(v);
    }
};

struct DissipativeRun {
    SedTrace trace;
    HeatLedger ledger;
    std::vector<DensityOperator> states;
    HierarchyState final_state;
};

DissipativeRun run_dissipative(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b,
                               int depth, const DensityOperator& rho0, double dt, double t_final,
                               int output_stride = 1, const HeomOptions& options = {});

// Same, continuing from an existing hierarchy (ledger measured from its current point).
DissipativeRun run_dissipative(HierarchyState state, double dt, double t_final, int output_stride = 1);

// ---- convergence ladder ----

struct HeatCheckpoints {
    std::vector<double> times;
    std::vector<double> q_a;
    std::vector<double> q_b;
};

// Q_A, Q_B at t = interval, 2 interval, ..., t_final (V_AB on, dt = model guard).
HeatCheckpoints heat_checkpoints(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b, int depth,
                                 const DensityOperator& rho0, double t_final, double interval,
                                 const HeomOptions& options = {});

struct LadderStep {
    int depth = 0;
    int n_matsubara = 0;      // applied to both baths
    double max_dq_a = 0.0;    // max over checkpoints of |Q_A - Q_A(base)|
    double max_dq_b = 0.0;
};

struct LadderReport {
    int depth = 0;
    int n_matsubara_a = 0, n_matsubara_b = 0;
    double t_final = 0.0;
    HeatCheckpoints base;
    LadderStep deeper;     // depth + 1
    LadderStep matsubara;  // n_matsubara + 1 on both baths

    double max_change() const;
};

LadderReport convergence_ladder(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b, int depth,
                                const DensityOperator& rho0, double t_final, double interval,
                                const HeomOptions& options = {});

} // namespace qcorr
