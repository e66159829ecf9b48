#include "qcorr/pump.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qcorr/integrator.hpp"

namespace qcorr {

namespace {

double raw_sed(const Mat4& rho) { return (rho(2, 2) - rho(1, 1)).real(); }

double marginal_distance(const DensityOperator& rho, const std::array<DensityOperator, 2>& targets) {
    return std::max(trace_distance(partial_trace(rho, Subsystem::A), targets[0]),
                    trace_distance(partial_trace(rho, Subsystem::B), targets[1]));
}

struct Recorder {
    PumpRun& run;
    double t0;
    std::array<double, 2> origin;
    int cycle = 0;

    void operator()(const HierarchyState& s) {
        DensityOperator rho = s.reduced_state();
        const auto loss = bath_energy_loss(s);
        run.trace.times.push_back(s.time - t0);
        run.trace.sed.push_back(sed(rho));
        run.trace.concurrence.push_back(concurrence(rho));
        run.trace.mutual_information.push_back(mutual_information(rho));
        run.ledger.append(s.time - t0, loss[0] - origin[0], loss[1] - origin[1], qubit_interaction_energy(s));
        run.states.push_back(std::move(rho));
        run.cycle_of_sample.push_back(cycle);
    }
};

// Advance by `duration` in equal steps <= dt, sampling every `stride` steps and at the end.
template <class OnSample>
void propagate(HierarchyState& s, HeomStepper& stepper, double duration, double dt, int stride, OnSample&& on_sample) {
    const auto steps = integration_steps(duration, dt);
    if (steps == 0) return;
    const double h = duration / static_cast<double>(steps);
    for (long long k = 1; k <= steps; ++k) {
        stepper.step(s, h);
        if (k % stride == 0 || k == steps) on_sample(s);
    }
}

} // namespace

void CycleSchedule::validate() const {
    std::ostringstream os;
    if (tau_connect && !(std::isfinite(*tau_connect) && *tau_connect > 0.0))
        os << "CycleSchedule: tau_connect must be > 0 (got " << *tau_connect << ")";
    else if (!(std::isfinite(tau_relax) && tau_relax > 0.0))
        os << "CycleSchedule: tau_relax must be > 0 (got " << tau_relax << ")";
    else if (n_cycles < 1)
        os << "CycleSchedule: n_cycles must be >= 1 (got " << n_cycles << ")";
    else
        return;
    throw invariant_error(os.str());
}

// ---- strokes ----

Injection inject_correlation(HierarchyState state, const ChiMode& chi, bool reset_ados,
                             const std::array<DensityOperator, 2>* targets, double target_tol) {
    Injection out;
    const DensityOperator rho = state.reduced_state();
    const DensityOperator rho_a = partial_trace(rho, Subsystem::A);
    const DensityOperator rho_b = partial_trace(rho, Subsystem::B);

    if (targets) {
        const double d = marginal_distance(rho, *targets);
        if (d > target_tol) {
            std::ostringstream os;
            os << "inject_correlation: qubit marginals are " << d
               << " (trace distance) from their Gibbs targets; the fuel state assumes local equilibrium";
            out.warning = os.str();
        }
    }

    if (chi.mode != FuelMode::none) {
        const LambdaWeights w = lambda_weights(rho_a, rho_b);
        const CorrelationMatrix c =
            chi.mode == FuelMode::optimal ? optimal_chi(w, state.model->config().phi_chi) : chi.custom;
        if (!c.feasible(w)) throw feasibility_error("inject_correlation: chi violates positivity of rho_AB");
        const DensityOperator fuel(kron(rho_a.matrix(), rho_b.matrix()) + c.matrix(), StateTolerance::relaxed());
        state.ados[0] = fuel.matrix();
        out.I0 = mutual_information(fuel);
    }

    if (reset_ados) {
        const auto before = bath_energy_loss(state);
        for (std::size_t a = 1; a < state.ados.size(); ++a) state.ados[a].setZero();
        const auto after = bath_energy_loss(state);
        for (std::size_t k = 0; k < 2; ++k) state.system_heat[k] += before[k] - after[k];
    }
    out.state = std::move(state);
    return out;
}

double decouple_cost(const HierarchyState& state) { return qubit_interaction_energy(state); }

TauRefinement refine_tau_connect(const HierarchyState& injected, double dt) {
    const HeomModel& model = *injected.model;
    const PairConfig& cfg = model.config();
    TauRefinement r;
    r.formula = first_sed_maximum_time(cfg);

    const double window = std::numbers::pi / cfg.omega;
    const auto steps = integration_steps(window, dt);
    const double h = window / static_cast<double>(steps);

    HierarchyState s = injected;
    s.coupled = true;
    HeomStepper stepper;

    // States at the two previous grid points.
    HierarchyState prev2 = s, prev1 = s;
    double v2 = raw_sed(s.ados[0]), v1 = v2;
    long long found = -1;
    long long best_k = 0;
    double best = v1;
    for (long long k = 1; k <= steps; ++k) {
        stepper.step(s, h);
        const double v = raw_sed(s.ados[0]);
        if (k >= 2 && v1 >= v2 && v1 > v) {
            found = k - 1;
            break;
        }
        if (v > best) {
            best = v;
            best_k = k;
        }
        prev2 = std::move(prev1);
        prev1 = s;
        v2 = v1;
        v1 = v;
    }

    double t_left;
    HierarchyState left;
    if (found > 0) {
        t_left = static_cast<double>(found - 1) * h;
        left = std::move(prev2);
    } else {
        // No interior maximum in the window; fall back to the grid argmax.
        HierarchyState replay = injected;
        replay.coupled = true;  // restart from the injection
        HeomStepper st;
        const long long k0 = std::max<long long>(0, best_k - 1);
        for (long long k = 0; k < k0; ++k) st.step(replay, h);
        t_left = static_cast<double>(k0) * h;
        left = std::move(replay);
        found = best_k;
    }
    r.grid = static_cast<double>(found) * h;

    const double span = std::min(2.0 * h, window - t_left);
    auto eval = [&](double t) {
        HierarchyState p = left;
        HeomStepper st;
        const double d = t - t_left;
        if (d > 0.0) st.advance(p, d, h);
        return raw_sed(p.ados[0]);
    };

    // Golden-section search on [t_left, t_left + span].
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = t_left, b = t_left + span;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = eval(c), fd = eval(d);
    for (int it = 0; it < 60 && (b - a) > 1e-10 * std::max(1.0, b); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d);
        }
    }
    r.refined = 0.5 * (a + b);
    r.sed_max = eval(r.refined);
    return r;
}

// ---- full run ----

PumpRun run_pump(const PairConfig& config, const BathSpec& bath_a, const BathSpec& bath_b,
                 const CycleSchedule& schedule, int depth, const PumpOptions& options) {
    config.validate();
    schedule.validate();
    if (options.output_stride < 1) throw std::invalid_argument("run_pump: output_stride must be >= 1");

    PumpRun run;
    const double kappa_min = std::min(bath_a.kappa, bath_b.kappa);
    if (schedule.tau_relax * kappa_min < 3.0) {
        std::ostringstream os;
        os << "run_pump: tau_relax * min(kappa) = " << schedule.tau_relax * kappa_min
           << " < 3; the qubits may not rethermalize between cycles";
        run.warnings.push_back(os.str());
    }

    // Stroke a before the first cycle: bare Gibbs product, V_AB off.
    HierarchyState s = build_hierarchy(config, bath_a, bath_b, depth, gibbs_product(config), options.heom);
    const double dt = options.dt > 0.0 ? options.dt : s.model->max_step();
    if (dt > s.model->max_step() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "run_pump: dt = " << dt << " exceeds the resolution guard " << s.model->max_step();
        throw step_size_error(os.str());
    }
    HeomStepper stepper;
    s.coupled = false;
    stepper.advance(s, options.tau_prethermalize.value_or(schedule.tau_relax), dt);
    {
        const DensityOperator rho = s.reduced_state();
        run.targets = {partial_trace(rho, Subsystem::A), partial_trace(rho, Subsystem::B)};
    }

    Recorder rec{run, s.time, bath_energy_loss(s)};
    rec(s);
    auto sample = [&](const HierarchyState& st) { rec(st); };

    for (int cycle = 0; cycle < schedule.n_cycles; ++cycle) {
        rec.cycle = cycle;
        const auto loss_start = bath_energy_loss(s);

        // Stroke b
        Injection inj = inject_correlation(std::move(s), schedule.chi, options.reset_ados, &run.targets,
                                           options.gibbs_tolerance);
        if (inj.warning) run.warnings.push_back("cycle " + std::to_string(cycle) + ": " + *inj.warning);
        s = std::move(inj.state);

        if (cycle == 0) {
            if (schedule.tau_connect) {
                run.tau_connect = *schedule.tau_connect;
            } else {
                run.refinement = refine_tau_connect(s, dt);
                run.tau_connect = run.refinement->refined;
            }
        }

        // Stroke c
        s.coupled = true;
        rec(s);
        propagate(s, stepper, run.tau_connect, dt, options.output_stride, sample);

        // Stroke d
        CycleRecord record;
        record.cycle_index = cycle;
        record.I0_injected = inj.I0;
        record.residual_V = decouple_cost(s);
        s.coupled = false;
        if (std::abs(record.residual_V) > 1e-6) {
            std::ostringstream os;
            os << "cycle " << cycle << ": detaching the qubits costs work <V_AB> = " << record.residual_V;
            run.warnings.push_back(os.str());
        }
        const double half = 0.5 * schedule.tau_relax;
        propagate(s, stepper, half, dt, options.output_stride, sample);
        const double d_mid = marginal_distance(s.reduced_state(), run.targets);
        propagate(s, stepper, schedule.tau_relax - half, dt, options.output_stride, sample);
        record.end_state_distance = marginal_distance(s.reduced_state(), run.targets);

        if (record.end_state_distance > options.gibbs_tolerance) {
            std::ostringstream os;
            os << "cycle " << cycle << ": marginals end " << record.end_state_distance
               << " from their Gibbs targets (midpoint " << d_mid << ")";
            if (record.end_state_distance >= d_mid) throw numerical_error("run_pump: rethermalization diverges; " + os.str());
            run.warnings.push_back(os.str());
        }

        const auto loss_end = bath_energy_loss(s);
        record.Q_A_cycle = loss_end[0] - loss_start[0];
        record.Q_B_cycle = loss_end[1] - loss_start[1];
        run.cycles.push_back(record);
    }
    run.final_state = std::move(s);
    return run;
}

} // namespace qcorr
