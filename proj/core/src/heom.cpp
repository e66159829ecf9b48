#include "qcorr/heom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qcorr/integrator.hpp"

namespace qcorr {

namespace {

constexpr double pi = std::numbers::pi;

// Below this many ADOs threading costs more than it saves.
constexpr std::size_t parallel_threshold = 64;

// Entries this large mean the hierarchy has blown up.
constexpr double overflow_limit = 1e8;

Mat4 coupling_matrix(CouplingAxis axis, Subsystem on) {
    const ComplexMatrix p = axis == CouplingAxis::x ? ComplexMatrix(pauli::x()) : ComplexMatrix(pauli::z());
    return embed(p, on);
}

} // namespace

// --------------------------- Bath ---------------------------------------------

void BathSpec::validate() const {
    auto bad = [](const char* what, double v) {
        std::ostringstream os;
        os << "BathSpec: " << what << " (got " << v << ")";
        throw invariant_error(os.str());
    };
    if (!(std::isfinite(kappa) && kappa >= 0.0)) bad("kappa must be >= 0", kappa);
    if (!(std::isfinite(gamma_c) && gamma_c > 0.0)) bad("gamma_c must be > 0", gamma_c);
    if (!(std::isfinite(temperature) && temperature > 0.0)) bad("temperature must be > 0", temperature);
    if (n_matsubara < 0) bad("n_matsubara must be >= 0", n_matsubara);
}

BathDecomposition drude_lorentz_decomposition(const BathSpec& bath) {
    bath.validate();
    const double lam = bath.kappa;
    const double g = bath.gamma_c;
    const double T = bath.temperature;
    const double beta = 1.0 / T;

    BathDecomposition d;
    d.terms.push_back({lam * g * cplx(1.0 / std::tan(0.5 * beta * g), -1.0), g});
    double explicit_sum = 0.0;
    for (int j = 1; j <= bath.n_matsubara; ++j) {
        const double nu = 2.0 * pi * j * T;
        const double c = 4.0 * lam * g * nu * T / (nu * nu - g * g);
        d.terms.push_back({c, nu});
        explicit_sum += c / nu;
    }
    // sum_{j>=1} c_j / nu_j = 2 lambda / (beta gamma) - lambda cot(beta gamma / 2)
    const double total = 2.0 * lam / (beta * g) - lam / std::tan(0.5 * beta * g);
    d.remainder = total - explicit_sum;
    return d;
}

// --------------------------- Index bookkeeping --------------------------------

std::size_t hierarchy_size(int n_modes, int depth) {
    if (n_modes < 0 || depth < 0) throw std::invalid_argument("hierarchy_size: negative argument");
    // binomial(n_modes + depth, depth), saturating
    long double v = 1.0L;
    for (int i = 1; i <= depth; ++i) v = v * static_cast<long double>(n_modes + i) / static_cast<long double>(i);
    if (v > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2))
        return std::numeric_limits<std::size_t>::max() / 2;
    return static_cast<std::size_t>(std::llround(v));
}

HierarchyIndex::HierarchyIndex(int n_modes, int depth, std::size_t cap) : n_modes_(n_modes), depth_(depth) {
    if (n_modes < 1) throw std::invalid_argument("HierarchyIndex: need at least one mode");
    if (depth < 1 || depth > 255) throw std::invalid_argument("HierarchyIndex: depth must be in [1, 255]");
    const std::size_t n = hierarchy_size(n_modes, depth);
    if (n > cap) {
        std::ostringstream os;
        os << "hierarchy with " << n_modes << " modes at depth " << depth << " needs " << n
           << " ADOs, above the cap of " << cap;
        throw resource_error(os.str());
    }

    indices_.reserve(n * static_cast<std::size_t>(n_modes));
    tiers_.reserve(n);
    std::vector<std::uint8_t> current(static_cast<std::size_t>(n_modes), 0);

    // Enumerate compositions of each tier t in lexicographic order.
    auto emit = [&](auto&& self, int pos, int remaining, int t) -> void {
        if (pos == n_modes - 1) {
            current[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(remaining);
            lookup_.emplace(std::string(current.begin(), current.end()), tiers_.size());
            indices_.insert(indices_.end(), current.begin(), current.end());
            tiers_.push_back(t);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            current[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(v);
            self(self, pos + 1, remaining - v, t);
        }
    };
    for (int t = 0; t <= depth; ++t) emit(emit, 0, t, t);

    up_.assign(size() * static_cast<std::size_t>(n_modes), -1);
    down_.assign(size() * static_cast<std::size_t>(n_modes), -1);
    std::string key;
    for (std::size_t a = 0; a < size(); ++a) {
        const auto* base = indices_.data() + a * static_cast<std::size_t>(n_modes);
        for (int m = 0; m < n_modes; ++m) {
            key.assign(base, base + n_modes);
            if (tiers_[a] < depth) {
                key[static_cast<std::size_t>(m)] = static_cast<char>(base[m] + 1);
                up_[a * n_modes + m] = static_cast<std::ptrdiff_t>(lookup_.at(key));
                key[static_cast<std::size_t>(m)] = static_cast<char>(base[m]);
            }
            if (base[m] > 0) {
                key[static_cast<std::size_t>(m)] = static_cast<char>(base[m] - 1);
                down_[a * n_modes + m] = static_cast<std::ptrdiff_t>(lookup_.at(key));
            }
        }
    }
}

std::span<const std::uint8_t> HierarchyIndex::multi_index(std::size_t ado) const {
    return {indices_.data() + ado * static_cast<std::size_t>(n_modes_), static_cast<std::size_t>(n_modes_)};
}

std::size_t HierarchyIndex::offset_of(std::span<const int> n) const {
    if (static_cast<int>(n.size()) != n_modes_) throw std::out_of_range("offset_of: wrong number of modes");
    std::string key;
    for (int v : n) {
        if (v < 0 || v > depth_) throw std::out_of_range("offset_of: index outside the hierarchy");
        key.push_back(static_cast<char>(v));
    }
    auto it = lookup_.find(key);
    if (it == lookup_.end()) throw std::out_of_range("offset_of: index outside the hierarchy");
    return it->second;
}

// --------------------------- Model --------------------------------------------

HeomModel::HeomModel(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b, int depth,
                     const HeomOptions& options)
    : config_(config),
      baths_{bath_a, bath_b},
      options_(options),
      index_((bath_a.validate(), bath_b.validate(), 2 + bath_a.n_matsubara + bath_b.n_matsubara), depth,
             options.ado_cap) {
    config_.validate();
    max_step_ = 0.01 / config_.omega;

    for (int k = 0; k < 2; ++k) {
        const auto& bath = baths_[static_cast<std::size_t>(k)];
        const auto d = drude_lorentz_decomposition(bath);
        for (const auto& term : d.terms) {
            const double mag = std::abs(term.coefficient);
            modes_.push_back({k, term.coefficient, term.rate, mag > 0.0 ? std::sqrt(mag) : 1.0});
        }
        remainder_[static_cast<std::size_t>(k)] = options_.matsubara_remainder ? d.remainder : 0.0;
        max_step_ = std::min(max_step_, 0.1 / bath.gamma_c);
        if (bath.n_matsubara > 0) max_step_ = std::min(max_step_, 0.1 / d.terms.back().rate);
        q_[static_cast<std::size_t>(k)] = coupling_matrix(bath.coupling, k == 0 ? Subsystem::A : Subsystem::B);
    }
    if (static_cast<int>(modes_.size()) != index_.n_modes())
        throw std::logic_error("HeomModel: mode count mismatch");

    h_free_ = local_hamiltonian(Subsystem::A).matrix() + local_hamiltonian(Subsystem::B).matrix();
    v_ab_ = interaction_hamiltonian(config_).matrix();

    const std::size_t n = index_.size();
    const int m = n_modes();
    damping_.assign(n, 0.0);
    up_coef_.assign(n * m, 0.0);
    down_coef_.assign(n * m, 0.0);
    down_coef_conj_.assign(n * m, 0.0);
    closure_.assign(n * 2, 0.0);

    for (std::size_t a = 0; a < n; ++a) {
        const auto idx = index_.multi_index(a);
        double damp = 0.0;
        for (int j = 0; j < m; ++j) damp += idx[j] * modes_[j].rate;
        damping_[a] = damp;

        for (int j = 0; j < m; ++j) {
            const Mode& md = modes_[j];
            const double nj = idx[j];
            up_coef_[a * m + j] = -I_unit * std::sqrt(nj + 1.0) * md.scale;
            down_coef_[a * m + j] = -I_unit * std::sqrt(nj) * md.coefficient / md.scale;
            down_coef_conj_[a * m + j] = -I_unit * std::sqrt(nj) * std::conj(md.coefficient) / md.scale;
        }
        for (int k = 0; k < 2; ++k) {
            cplx strength = remainder_[static_cast<std::size_t>(k)];
            if (options_.markovian_closure && index_.tier(a) == index_.depth()) {
                for (int j = 0; j < m; ++j) {
                    if (modes_[j].bath != k) continue;
                    strength += (idx[j] + 1.0) / (damp + modes_[j].rate) * modes_[j].coefficient;
                }
            }
            closure_[a * 2 + k] = strength;
        }
    }
}

void HeomModel::derivative_range(std::span<const Mat4> ados, const Mat4& h, std::span<Mat4> out,
                                 std::size_t begin, std::size_t end) const {
    const int m = n_modes();
    for (std::size_t a = begin; a < end; ++a) {
        const Mat4& r = ados[a];
        Mat4 acc = -I_unit * (h * r - r * h) - damping_[a] * r;
        for (int k = 0; k < 2; ++k) {
            const Mat4& q = q_[static_cast<std::size_t>(k)];
            Mat4 left = Mat4::Zero();   // multiplied by Q from the left
            Mat4 right = Mat4::Zero();  // multiplied by Q from the right (subtracted)
            bool any = false;
            for (int j = 0; j < m; ++j) {
                if (modes_[j].bath != k) continue;
                const std::size_t slot = a * m + j;
                if (const auto u = index_.raised(a, j); u >= 0) {
                    const Mat4 t = up_coef_[slot] * ados[static_cast<std::size_t>(u)];
                    left += t;
                    right += t;
                    any = true;
                }
                if (const auto d = index_.lowered(a, j); d >= 0) {
                    const Mat4& rd = ados[static_cast<std::size_t>(d)];
                    left += down_coef_[slot] * rd;
                    right += down_coef_conj_[slot] * rd;
                    any = true;
                }
            }
            const cplx s = closure_[a * 2 + k];
            if (s != 0.0) {
                const Mat4 x = s * (q * r) - std::conj(s) * (r * q);
                left -= x;
                right -= x;
                any = true;
            }
            if (any) acc += q * left - right * q;
        }
        out[a] = acc;
    }
}

void HeomModel::derivative(std::span<const Mat4> ados, bool coupled, std::span<Mat4> out,
                           std::array<double, 2>& heat_rate) const {
    const Mat4 h = system_hamiltonian(coupled);
    const std::size_t n = ados.size();
#if defined(_OPENMP)
    if (n >= parallel_threshold) {
        const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
        for (long long a = 0; a < nn; ++a)
            derivative_range(ados, h, out, static_cast<std::size_t>(a), static_cast<std::size_t>(a) + 1);
    } else {
        derivative_range(ados, h, out, 0, n);
    }
#else
    derivative_range(ados, h, out, 0, n);
#endif
    for (int k = 0; k < 2; ++k) {
        const Mat4& q = q_[static_cast<std::size_t>(k)];
        const Mat4 comm = h * q - q * h;
        heat_rate[static_cast<std::size_t>(k)] = (-I_unit * (comm * bath_moment(ados, k)).trace()).real();
    }
}

Mat4 HeomModel::bath_moment(std::span<const Mat4> ados, int k) const {
    Mat4 sigma = Mat4::Zero();
    for (int j = 0; j < n_modes(); ++j) {
        if (modes_[j].bath != k) continue;
        sigma += modes_[j].scale * ados[static_cast<std::size_t>(index_.raised(0, j))];
    }
    const double rem = remainder_[static_cast<std::size_t>(k)];
    if (rem != 0.0) {
        const Mat4& q = q_[static_cast<std::size_t>(k)];
        sigma += -I_unit * rem * (q * ados[0] - ados[0] * q);
    }
    return sigma;
}

// --------------------------- State --------------------------------------------

DensityOperator HierarchyState::reduced_state() const {
    return DensityOperator(hermitian_part(ados.front()), StateTolerance::relaxed());
}

HierarchyState build_hierarchy(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b, int depth,
                               const DensityOperator& rho0, const HeomOptions& options) {
    if (rho0.dim() != 4) throw dimension_error("build_hierarchy: expected a two-qubit state");
    bath_a.validate();
    bath_b.validate();
    HierarchyState s;
    s.model = std::make_shared<const HeomModel>(config, bath_a, bath_b, depth, options);
    s.ados.assign(s.model->index().size(), Mat4::Zero());
    s.ados[0] = rho0.matrix();
    return s;
}

// --------------------------- Propagation --------------------------------------

void HeomStepper::ensure(std::size_t n) {
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) {
        if (v->size() != n) v->assign(n, Mat4::Zero());
    }
}

void HeomStepper::step(HierarchyState& state, double dt) {
    const HeomModel& model = *state.model;
    if (!(dt > 0.0) || dt > model.max_step() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "heom_step: dt = " << dt << " exceeds the resolution guard " << model.max_step()
           << " = min(0.01/Omega, 0.1/gamma_c, 0.1/nu_K)";
        throw step_size_error(os.str());
    }
    const std::size_t n = state.ados.size();
    ensure(n);
    auto& y = state.ados;

    std::array<double, 2> j1{}, j2{}, j3{}, j4{};
    model.derivative(y, state.coupled, k1_, j1);
    for (std::size_t a = 0; a < n; ++a) tmp_[a] = y[a] + (0.5 * dt) * k1_[a];
    model.derivative(tmp_, state.coupled, k2_, j2);
    for (std::size_t a = 0; a < n; ++a) tmp_[a] = y[a] + (0.5 * dt) * k2_[a];
    model.derivative(tmp_, state.coupled, k3_, j3);
    for (std::size_t a = 0; a < n; ++a) tmp_[a] = y[a] + dt * k3_[a];
    model.derivative(tmp_, state.coupled, k4_, j4);

    const double w = dt / 6.0;
    for (std::size_t a = 0; a < n; ++a) y[a] += w * (k1_[a] + 2.0 * k2_[a] + 2.0 * k3_[a] + k4_[a]);
    for (std::size_t k = 0; k < 2; ++k) state.system_heat[k] += w * (j1[k] + 2.0 * j2[k] + 2.0 * j3[k] + j4[k]);
    state.time += dt;

    for (std::size_t a = 0; a < n; ++a) {
        const Mat4& r = y[a];
        if (!r.allFinite() || r.cwiseAbs().maxCoeff() > overflow_limit) {
            std::ostringstream os;
            os << "heom_step: non-finite or overflowing ADO at tier " << model.index().tier(a) << " (offset " << a
               << ") at t = " << state.time;
            throw numerical_error(os.str());
        }
    }
}

void HeomStepper::advance(HierarchyState& state, double duration, double dt) {
    const auto steps = integration_steps(duration, dt);
    if (steps == 0) return;
    const double h = duration / static_cast<double>(steps);
    for (long long i = 0; i < steps; ++i) step(state, h);
}

HierarchyState heom_step(HierarchyState state, double dt) {
    HeomStepper stepper;
    stepper.step(state, dt);
    return state;
}

// --------------------------- Heat ----------------------------------------------

double interaction_energy(const HierarchyState& state, int k) {
    const Mat4 sigma = state.model->bath_moment(state.ados, k);
    return (state.model->coupling_operator(k) * sigma).trace().real();
}

std::array<double, 2> bath_energy_loss(const HierarchyState& state) {
    return {state.system_heat[0] + interaction_energy(state, 0), state.system_heat[1] + interaction_energy(state, 1)};
}

HeatCurrents heat_currents(const HierarchyState& state) {
    const HeomModel& model = *state.model;
    std::vector<Mat4> d(state.ados.size());
    std::array<double, 2> j{};
    model.derivative(state.ados, state.coupled, d, j);
    // d/dt Tr(Q_k sigma_k) is linear in the ADOs, so evaluate bath_moment on the derivative.
    HeatCurrents out;
    out.bath_a = j[0] + (model.coupling_operator(0) * model.bath_moment(d, 0)).trace().real();
    out.bath_b = j[1] + (model.coupling_operator(1) * model.bath_moment(d, 1)).trace().real();
    return out;
}

double qubit_interaction_energy(const HierarchyState& state) {
    if (!state.coupled) return 0.0;
    return (state.model->interaction() * state.ados.front()).trace().real();
}

// --------------------------- Trajectories -------------------------------------

DissipativeRun run_dissipative(HierarchyState state, double dt, double t_final, int output_stride) {
    if (!(t_final >= 0.0)) throw std::invalid_argument("run_dissipative: t_final must be >= 0");
    if (output_stride < 1) throw std::invalid_argument("run_dissipative: output_stride must be >= 1");
    if (!(dt > 0.0) || dt > state.model->max_step() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "run_dissipative: dt = " << dt << " exceeds the resolution guard " << state.model->max_step();
        throw step_size_error(os.str());
    }

    DissipativeRun run;
    const double t0 = state.time;
    const auto origin = bath_energy_loss(state);
    auto record = [&](const HierarchyState& s) {
        DensityOperator rho = s.reduced_state();
        const auto loss = bath_energy_loss(s);
        run.trace.times.push_back(s.time - t0);
        run.trace.sed.push_back(sed(rho));
        run.trace.concurrence.push_back(concurrence(rho));
        run.trace.mutual_information.push_back(mutual_information(rho));
        run.ledger.append(s.time - t0, loss[0] - origin[0], loss[1] - origin[1], qubit_interaction_energy(s));
        run.states.push_back(std::move(rho));
    };

    record(state);
    const auto steps = integration_steps(t_final, dt);
    const double h = steps == 0 ? 0.0 : t_final / static_cast<double>(steps);
    HeomStepper stepper;
    for (long long k = 1; k <= steps; ++k) {
        stepper.step(state, h);
        if (k % output_stride == 0 || k == steps) record(state);
    }
    run.final_state = std::move(state);
    return run;
}

DissipativeRun run_dissipative(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b, int depth,
                               const DensityOperator& rho0, double dt, double t_final, int output_stride,
                               const HeomOptions& options) {
    return run_dissipative(build_hierarchy(config, bath_a, bath_b, depth, rho0, options), dt, t_final, output_stride);
}

// --------------------------- Convergence ladder -------------------------------

HeatCheckpoints heat_checkpoints(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b, int depth,
                                 const DensityOperator& rho0, double t_final, double interval,
                                 const HeomOptions& options) {
    if (!(interval > 0.0) || !(t_final > 0.0)) throw std::invalid_argument("heat_checkpoints: need t_final, interval > 0");
    HierarchyState s = build_hierarchy(config, bath_a, bath_b, depth, rho0, options);
    const double dt = s.model->max_step();
    const auto origin = bath_energy_loss(s);
    HeatCheckpoints out;
    HeomStepper stepper;
    double t = 0.0;
    while (t < t_final - 1e-12) {
        const double next = std::min(t_final, t + interval);
        stepper.advance(s, next - t, dt);
        t = next;
        const auto loss = bath_energy_loss(s);
        out.times.push_back(t);
        out.q_a.push_back(loss[0] - origin[0]);
        out.q_b.push_back(loss[1] - origin[1]);
    }
    return out;
}

namespace {

LadderStep compare(const HeatCheckpoints& base, const HeatCheckpoints& other, int depth, int k) {
    LadderStep r{depth, k, 0.0, 0.0};
    for (std::size_t i = 0; i < base.times.size() && i < other.times.size(); ++i) {
        r.max_dq_a = std::max(r.max_dq_a, std::abs(other.q_a[i] - base.q_a[i]));
        r.max_dq_b = std::max(r.max_dq_b, std::abs(other.q_b[i] - base.q_b[i]));
    }
    return r;
}

} // namespace

double LadderReport::max_change() const {
    return std::max({deeper.max_dq_a, deeper.max_dq_b, matsubara.max_dq_a, matsubara.max_dq_b});
}

LadderReport convergence_ladder(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b, int depth,
                                const DensityOperator& rho0, double t_final, double interval,
                                const HeomOptions& options) {
    LadderReport r;
    r.depth = depth;
    r.n_matsubara_a = bath_a.n_matsubara;
    r.n_matsubara_b = bath_b.n_matsubara;
    r.t_final = t_final;
    r.base = heat_checkpoints(config, bath_a, bath_b, depth, rho0, t_final, interval, options);

    const auto deeper = heat_checkpoints(config, bath_a, bath_b, depth + 1, rho0, t_final, interval, options);
    r.deeper = compare(r.base, deeper, depth + 1, bath_a.n_matsubara);

    BathSpec a = bath_a, b = bath_b;
    ++a.n_matsubara;
    ++b.n_matsubara;
    const auto more = heat_checkpoints(config, a, b, depth, rho0, t_final, interval, options);
    r.matsubara = compare(r.base, more, depth, a.n_matsubara);
    return r;
}

} // namespace qcorr
