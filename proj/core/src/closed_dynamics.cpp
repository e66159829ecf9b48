#include "qcorr/closed_dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qcorr/integrator.hpp"

namespace qcorr {

namespace {

constexpr double pi = std::numbers::pi;

double wrap_angle(double a) {
    // into (-pi, pi]
    double w = std::remainder(a, 2.0 * pi);
    if (w <= -pi) w += 2.0 * pi;
    return w;
}

void require_finite_positive(double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
        std::ostringstream os;
        os << "PairConfig: " << name << " must be finite and > 0 (got " << v << ")";
        throw invariant_error(os.str());
    }
}

} // namespace

// --------------------------- PairConfig ---------------------------------------

double PairConfig::delta() const { return wrap_angle(phi_v - phi_chi); }

void PairConfig::validate() const {
    require_finite_positive(T_A, "T_A");
    require_finite_positive(T_B, "T_B");
    require_finite_positive(omega, "Omega");
    if (!std::isfinite(phi_v) || !std::isfinite(phi_chi))
        throw invariant_error("PairConfig: phases must be finite");
}

PairConfig PairConfig::with_delta(double delta, double T_A, double T_B, double omega) {
    PairConfig c;
    c.T_A = T_A;
    c.T_B = T_B;
    c.omega = omega;
    c.phi_v = 0.0;
    c.phi_chi = -delta;
    return c;
}

// --------------------------- CorrelationMatrix --------------------------------

ComplexMatrix CorrelationMatrix::matrix() const {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = chi11;
    m(1, 1) = -chi11;
    m(2, 2) = -chi11;
    m(3, 3) = chi11;
    m(1, 2) = chi23;
    m(2, 1) = std::conj(chi23);
    return m;
}

bool CorrelationMatrix::feasible(const LambdaWeights& w, double tol) const {
    if (chi11 > std::min(w.l2, w.l3) + tol) return false;
    if (chi11 < -w.l4 - tol) return false;
    const double bound = std::sqrt(std::max(0.0, (w.l2 - chi11) * (w.l3 - chi11)));
    return std::abs(chi23) <= bound + tol;
}

// --------------------------- Hamiltonians -------------------------------------

HermitianObservable qubit_hamiltonian() {
    // Ground |0> at -1/2: sigma_z taken with sigma_z|0> = -|0>.
    return HermitianObservable(-0.5 * ComplexMatrix(pauli::z()));
}

HermitianObservable local_hamiltonian(Subsystem which) {
    return HermitianObservable(embed(qubit_hamiltonian().matrix(), which));
}

HermitianObservable interaction_hamiltonian(const PairConfig& config) {
    ComplexMatrix v = ComplexMatrix::Zero(4, 4);
    v(1, 2) = config.omega * std::polar(1.0, config.phi_v);
    v(2, 1) = std::conj(v(1, 2));
    return HermitianObservable(v);
}

HermitianObservable pair_hamiltonian(const PairConfig& config) {
    return HermitianObservable(local_hamiltonian(Subsystem::A).matrix()
                               + local_hamiltonian(Subsystem::B).matrix()
                               + interaction_hamiltonian(config).matrix());
}

double subsystem_energy(const DensityOperator& rho_ab, Subsystem which) {
    return local_hamiltonian(which).expectation(rho_ab);
}

double sed(const DensityOperator& rho_ab) {
    return subsystem_energy(rho_ab, Subsystem::A) - subsystem_energy(rho_ab, Subsystem::B);
}

// --------------------------- Fuel state ---------------------------------------

LambdaWeights lambda_weights(double beta_a, double beta_b) {
    // Ground |0> has energy -1/2, so its Boltzmann weight is e^{+beta/2}.
    const double za = 2.0 * std::cosh(0.5 * beta_a);
    const double zb = 2.0 * std::cosh(0.5 * beta_b);
    const double z = za * zb;
    LambdaWeights w;
    w.l1 = std::exp(0.5 * (beta_a + beta_b)) / z;
    w.l2 = std::exp(0.5 * (beta_a - beta_b)) / z;
    w.l3 = std::exp(0.5 * (-beta_a + beta_b)) / z;
    w.l4 = std::exp(-0.5 * (beta_a + beta_b)) / z;
    return w;
}

LambdaWeights lambda_weights(const PairConfig& config) {
    config.validate();
    return lambda_weights(config.beta_a(), config.beta_b());
}

LambdaWeights lambda_weights(const DensityOperator& rho_a, const DensityOperator& rho_b) {
    if (rho_a.dim() != 2 || rho_b.dim() != 2)
        throw dimension_error("lambda_weights: expected single-qubit marginals");
    const double a0 = rho_a(0, 0).real(), a1 = rho_a(1, 1).real();
    const double b0 = rho_b(0, 0).real(), b1 = rho_b(1, 1).real();
    return {a0 * b0, a0 * b1, a1 * b0, a1 * b1};
}

DensityOperator gibbs_product(const PairConfig& config) {
    config.validate();
    const auto h = qubit_hamiltonian();
    return tensor_product(gibbs_state(config.beta_a(), h), gibbs_state(config.beta_b(), h));
}

CorrelationMatrix optimal_chi(const LambdaWeights& w, double phi_chi) {
    return {-w.l4, std::polar(std::sqrt(w.l4), phi_chi)};
}

CorrelationMatrix optimal_chi(const PairConfig& config) {
    return optimal_chi(lambda_weights(config), config.phi_chi);
}

DensityOperator correlated_state(const PairConfig& config, const CorrelationMatrix& chi) {
    const auto w = lambda_weights(config);
    if (!chi.feasible(w)) throw feasibility_error("correlated_state: chi violates positivity of rho_AB");
    return DensityOperator(gibbs_product(config).matrix() + chi.matrix());
}

double optimal_concurrence(const PairConfig& config) {
    return 2.0 * std::sqrt(lambda_weights(config).l4);
}

ConcurrenceSearch brute_force_max_concurrence(const PairConfig& config, int grid_n,
                                              std::optional<double> fixed_chi11) {
    if (grid_n < 100) throw std::invalid_argument("brute_force_max_concurrence: grid_n must be >= 100");
    const auto w = lambda_weights(config);
    const double x_lo = -w.l4;
    const double x_hi = std::min(w.l2, w.l3);
    if (x_hi < x_lo) throw feasibility_error("brute_force_max_concurrence: empty feasible region");

    std::vector<double> xs;
    if (fixed_chi11) {
        if (*fixed_chi11 < x_lo || *fixed_chi11 > x_hi)
            throw feasibility_error("brute_force_max_concurrence: fixed chi11 outside feasible range");
        xs.push_back(*fixed_chi11);
    } else {
        xs.reserve(static_cast<std::size_t>(grid_n));
        for (int i = 0; i < grid_n; ++i)
            xs.push_back(x_lo + (x_hi - x_lo) * static_cast<double>(i) / (grid_n - 1));
    }

    ConcurrenceSearch best;
    best.chi = {xs.front(), 0.0};
    for (double x : xs) {
        const double y_max = (w.l2 - x) * (w.l3 - x);
        const double sep = std::sqrt(std::max(0.0, (w.l1 + x) * (w.l4 + x)));
        for (int j = 0; j < grid_n; ++j) {
            const double y = y_max * static_cast<double>(j) / (grid_n - 1);
            const double c = 2.0 * std::max(0.0, std::sqrt(y) - sep);
            if (c > best.c_max) {
                best.c_max = c;
                best.chi = {x, std::polar(std::sqrt(y), config.phi_chi)};
            }
        }
    }
    return best;
}

// --------------------------- Energy exchange ----------------------------------

double initial_sed(const PairConfig& config) {
    config.validate();
    return 0.5 * (std::tanh(0.5 * config.beta_b()) - std::tanh(0.5 * config.beta_a()));
}

double initial_sed_slope(const PairConfig& config, const CorrelationMatrix& chi) {
    const ComplexMatrix diff = local_hamiltonian(Subsystem::A).matrix() - local_hamiltonian(Subsystem::B).matrix();
    const ComplexMatrix v = interaction_hamiltonian(config).matrix();
    const ComplexMatrix x = chi.matrix();
    const cplx val = -I_unit * (diff * (v * x - x * v)).trace();
    return val.real();
}

double sed_phase(const PairConfig& config) {
    const double d0 = initial_sed(config);
    const double s = optimal_concurrence(config) * std::sin(config.delta());
    if (d0 == 0.0) {
        if (s == 0.0) return 0.0;
        return std::copysign(0.5 * pi, s);
    }
    return std::atan(s / d0);
}

double first_sed_maximum_time(const PairConfig& config) {
    // Delta(t) = Delta0 cos(2 Omega t) - C0 sin(delta) sin(2 Omega t)
    //          = A cos(2 Omega t + phi),  A >= 0.
    const double d0 = initial_sed(config);
    const double s = optimal_concurrence(config) * std::sin(config.delta());
    if (d0 == 0.0 && s == 0.0) return 0.0;
    const double phi = std::atan2(s, d0);
    double t = std::fmod(-phi, 2.0 * pi);
    if (t < 0.0) t += 2.0 * pi;
    return t / (2.0 * config.omega);
}

DensityOperator exact_closed_state(const PairConfig& config, double t) {
    const auto w = lambda_weights(config);
    const double c0 = 2.0 * std::sqrt(w.l4);
    const double d0 = w.l3 - w.l2;  // = initial_sed(config)
    const double delta = config.delta();
    const double c = std::cos(2.0 * config.omega * t);
    const double s = std::sin(2.0 * config.omega * t);

    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = w.l1 - w.l4;
    m(3, 3) = 0.0;
    const double mid = w.l2 + w.l3 + 2.0 * w.l4;
    m(1, 1) = 0.5 * (mid - d0 * c + std::sin(delta) * c0 * s);
    m(2, 2) = 0.5 * (mid + d0 * c - std::sin(delta) * c0 * s);
    // rho_23' = -i Omega e^{i phi_v} Delta(t) integrates to +Delta0 sin(2 Omega t) here.
    m(1, 2) = 0.5 * std::polar(1.0, config.phi_v)
            * cplx(c0 * std::cos(delta), -(std::sin(delta) * c0 * c + d0 * s));
    m(2, 1) = std::conj(m(1, 2));
    return DensityOperator(m);
}

double exact_sed(const PairConfig& config, double t) {
    const double d0 = initial_sed(config);
    const double s = optimal_concurrence(config) * std::sin(config.delta());
    const double theta = sed_phase(config);
    const double x = 2.0 * config.omega * t + theta;
    if (d0 == 0.0) return std::abs(s) * std::cos(x);
    return d0 * std::sqrt(1.0 + (s / d0) * (s / d0)) * std::cos(x);
}

// --------------------------- Numerical propagation ----------------------------

namespace {

ClosedRun propagate(const ComplexMatrix& h, const DensityOperator& rho0, double dt, double t_final,
                    int output_stride) {
    if (!(t_final >= 0.0)) throw std::invalid_argument("integrate_lvn: t_final must be >= 0");
    if (output_stride < 1) throw std::invalid_argument("integrate_lvn: output_stride must be >= 1");
    if (rho0.dim() != h.rows()) throw dimension_error("integrate_lvn: state/Hamiltonian dimension mismatch");

    const auto steps = integration_steps(t_final, dt);
    const double step = steps == 0 ? 0.0 : t_final / static_cast<double>(steps);

    auto rhs = [&h](const ComplexMatrix& r) -> ComplexMatrix { return -I_unit * (h * r - r * h); };

    ClosedRun run;
    auto record = [&run](double t, const ComplexMatrix& r) {
        const StateTolerance tol{1e-10, 1e-10, -1e-9};
        try {
            DensityOperator d(r, tol);
            run.trace.times.push_back(t);
            if (d.dim() == 4) {
                run.trace.sed.push_back(sed(d));
                run.trace.concurrence.push_back(concurrence(d));
                run.trace.mutual_information.push_back(mutual_information(d));
            }
            run.states.push_back(std::move(d));
        } catch (const invariant_error& e) {
            std::ostringstream os;
            os << "integrate_lvn: state left the physical set at t = " << t << ": " << e.what();
            throw invariant_error(os.str());
        }
    };

    ComplexMatrix r = rho0.matrix();
    record(0.0, r);
    Rk4Workspace<ComplexMatrix> ws;
    for (long long k = 1; k <= steps; ++k) {
        rk4_step(r, step, rhs, ws);
        if (k % output_stride == 0 || k == steps) record(static_cast<double>(k) * step, r);
    }
    return run;
}

} // namespace

ClosedRun integrate_lvn(const PairConfig& config, const DensityOperator& rho0, double dt, double t_final,
                        int output_stride) {
    config.validate();
    const double guard = 0.01 / config.omega;
    if (!(dt > 0.0) || dt > guard * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "integrate_lvn: dt = " << dt << " violates the resolution guard dt <= 0.01/Omega = " << guard;
        throw step_size_error(os.str());
    }
    return propagate(pair_hamiltonian(config).matrix(), rho0, dt, t_final, output_stride);
}

ClosedRun integrate_lvn(const HermitianObservable& hamiltonian, const DensityOperator& rho0, double dt,
                        double t_final, int output_stride) {
    const double norm = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(hamiltonian.matrix(), Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .cwiseAbs()
                            .maxCoeff();
    if (!(dt > 0.0) || dt * norm > 0.1 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "integrate_lvn: dt = " << dt << " violates dt * ||H|| <= 0.1 (||H|| = " << norm << ")";
        throw step_size_error(os.str());
    }
    return propagate(hamiltonian.matrix(), rho0, dt, t_final, output_stride);
}

} // namespace qcorr
