#include "qcorr/thermo.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcorr {

namespace {

constexpr double identity_tol = 1e-10;

struct Entropies {
    double s_a, s_b, s_ab;
};

Entropies entropies(const DensityOperator& rho) {
    return {von_neumann_entropy(partial_trace(rho, Subsystem::A)), von_neumann_entropy(partial_trace(rho, Subsystem::B)),
            von_neumann_entropy(rho)};
}

} // namespace

ThermoSnapshot reference_snapshot(const DensityOperator& rho0, double t) {
    if (rho0.dim() != 4) throw dimension_error("reference_snapshot: expected a two-qubit state");
    const auto e = entropies(rho0);
    ThermoSnapshot s;
    s.t = t;
    s.E_A = subsystem_energy(rho0, Subsystem::A);
    s.E_B = subsystem_energy(rho0, Subsystem::B);
    s.S_A = e.s_a;
    s.S_B = e.s_b;
    s.S_AB = e.s_ab;
    s.I_AB = e.s_a + e.s_b - e.s_ab;
    return s;
}

ThermoSnapshot snapshot(double t, const DensityOperator& rho_ab, double q_a, double q_b, const PairConfig& config,
                        const ThermoSnapshot& reference) {
    config.validate();
    ThermoSnapshot s = reference_snapshot(rho_ab, t);
    s.Q_A = q_a;
    s.Q_B = q_b;

    const double bath_a = -q_a / config.T_A;
    const double bath_b = -q_b / config.T_B;
    s.Sigma0 = (s.S_A - reference.S_A + bath_a) + (s.S_B - reference.S_B + bath_b);
    s.Sigma = (s.S_AB - reference.S_AB) + bath_a + bath_b;

    const double gap = s.Sigma0 - s.Sigma - (s.I_AB - reference.I_AB);
    if (std::abs(gap) > identity_tol) {
        std::ostringstream os;
        os << "snapshot: Sigma0 - Sigma - dI = " << gap << " at t = " << t;
        throw invariant_error(os.str());
    }
    return s;
}

std::vector<ThermoSnapshot> thermo_series(const std::vector<double>& times, const std::vector<DensityOperator>& states,
                                          const std::vector<double>& q_a, const std::vector<double>& q_b,
                                          const PairConfig& config) {
    const std::size_t n = times.size();
    if (states.size() != n || q_a.size() != n || q_b.size() != n)
        throw dimension_error("thermo_series: sample vectors differ in length");
    std::vector<ThermoSnapshot> out;
    if (n == 0) return out;
    out.reserve(n);
    const ThermoSnapshot ref = reference_snapshot(states.front(), times.front());
    for (std::size_t i = 0; i < n; ++i) out.push_back(snapshot(times[i], states[i], q_a[i], q_b[i], config, ref));
    return out;
}

// ---- identities ----

Eq2Terms eq2_decomposition(const DensityOperator& rho_t, const DensityOperator& rho0, const PairConfig& config,
                           Dynamics kind) {
    if (kind != Dynamics::closed)
        throw invariant_error("eq2_decomposition: identity only holds for closed (unitary) evolution of the pair");
    config.validate();
    const auto a_t = partial_trace(rho_t, Subsystem::A);
    const auto b_t = partial_trace(rho_t, Subsystem::B);
    const auto a_0 = partial_trace(rho0, Subsystem::A);
    const auto b_0 = partial_trace(rho0, Subsystem::B);

    Eq2Terms r;
    const double dE_A = subsystem_energy(rho_t, Subsystem::A) - subsystem_energy(rho0, Subsystem::A);
    r.lhs = (config.beta_a() - config.beta_b()) * dE_A;
    r.rel_a = relative_entropy(a_t, a_0);
    r.rel_b = relative_entropy(b_t, b_0);
    r.dI = mutual_information(rho_t) - mutual_information(rho0);
    return r;
}

double local_clausius_gap(const DensityOperator& rho_t, const DensityOperator& rho0, const PairConfig& config,
                          Subsystem which) {
    config.validate();
    const double beta = which == Subsystem::A ? config.beta_a() : config.beta_b();
    const double dE = subsystem_energy(rho_t, which) - subsystem_energy(rho0, which);
    const double dS = von_neumann_entropy(partial_trace(rho_t, which)) - von_neumann_entropy(partial_trace(rho0, which));
    return beta * dE - dS;
}

// ---- COP ----

CopReport cop_report(const CycleRecord& cycle, double I0, const PairConfig& config, bool include_decoupling_work) {
    config.validate();
    if (!(I0 >= 0.0)) throw std::invalid_argument("cop_report: I0 must be >= 0");
    CopReport r;
    const double work = config.T_A * I0 + (include_decoupling_work ? std::abs(cycle.residual_V) : 0.0);
    if (cycle.Q_B_cycle == 0.0)
        r.cop_ratio = 0.0;
    else if (work > 0.0)
        r.cop_ratio = cycle.Q_B_cycle / work;
    else
        r.cop_ratio = std::copysign(std::numeric_limits<double>::infinity(), cycle.Q_B_cycle);

    if (config.T_A <= config.T_B) {
        r.carnot = std::numeric_limits<double>::infinity();
        r.degenerate = true;
        r.satisfied = true;
        return r;
    }
    r.carnot = config.T_B / (config.T_A - config.T_B);
    r.satisfied = r.cop_ratio <= r.carnot + 1e-9;
    return r;
}

} // namespace qcorr
