// test_closed_dynamics.cpp - fuel state, closed-form solution and LVN propagation

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcorr/closed_dynamics.hpp"

using namespace qcorr;

namespace {

constexpr double pi = std::numbers::pi;

// Thermal populations of a qubit with levels -1/2, +1/2 written out by hand.
std::array<double, 4> boltzmann_lambdas(double ta, double tb) {
    const double a0 = 1.0 / (1.0 + std::exp(-1.0 / ta)), a1 = 1.0 - a0;
    const double b0 = 1.0 / (1.0 + std::exp(-1.0 / tb)), b1 = 1.0 - b0;
    return {a0 * b0, a0 * b1, a1 * b0, a1 * b1};
}

// H_A + H_B + V written in the product basis without library helpers.
oracle::Mat pair_hamiltonian_oracle(const PairConfig& c) {
    oracle::Mat h = oracle::Mat::Zero(4, 4);
    h(0, 0) = -1.0;
    h(3, 3) = 1.0;
    h(1, 2) = std::polar(c.omega, c.phi_v);
    h(2, 1) = std::polar(c.omega, -c.phi_v);
    return h;
}

double max_entry(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

// ---- configuration ----

TEST(PairConfig, DeltaWrapsIntoHalfOpenInterval) {
    PairConfig c;
    c.phi_v = 0.0;
    c.phi_chi = pi;
    EXPECT_NEAR(c.delta(), pi, 1e-15);
    c.phi_chi = -3.0 * pi / 2.0;
    EXPECT_NEAR(c.delta(), -pi / 2.0, 1e-14);
}

TEST(PairConfig, ValidateRejectsNonPositive) {
    PairConfig c;
    c.T_B = 0.0;
    EXPECT_THROW(c.validate(), invariant_error);
    c = PairConfig{};
    c.omega = -0.1;
    EXPECT_THROW(c.validate(), invariant_error);
}

// ---- fuel state ----

TEST(FuelState, LambdaWeightsMatchBoltzmann) {
    for (auto [ta, tb] : {std::pair{2.0, 1.0}, {1.0, 2.0}, {1.5, 1.5}, {0.5, 3.0}}) {
        const auto w = lambda_weights(PairConfig::with_delta(0.0, ta, tb));
        const auto l = boltzmann_lambdas(ta, tb);
        EXPECT_NEAR(w.l1, l[0], 1e-15);
        EXPECT_NEAR(w.l2, l[1], 1e-15);
        EXPECT_NEAR(w.l3, l[2], 1e-15);
        EXPECT_NEAR(w.l4, l[3], 1e-15);
    }
}

TEST(FuelState, ReferenceNumbersAtDefaultTemperatures) {
    const PairConfig c;  // T_A = 2, T_B = 1
    const auto w = lambda_weights(c);
    EXPECT_NEAR(w.l1, 0.45505, 5e-6);
    EXPECT_NEAR(w.l2, 0.16741, 5e-6);
    EXPECT_NEAR(w.l3, 0.27600, 5e-6);
    EXPECT_NEAR(w.l4, 0.10154, 5e-6);
    EXPECT_NEAR(optimal_concurrence(c), 0.63730, 5e-6);
    EXPECT_NEAR(initial_sed(c), 0.10860, 5e-6);
}

TEST(FuelState, OptimalStateIsLocallyThermalAndMaximallyEntangled) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> temp(0.5, 3.0), phase(-pi, pi);
    for (int trial = 0; trial < 40; ++trial) {
        PairConfig c = PairConfig::with_delta(phase(rng), temp(rng), temp(rng));
        const auto rho = correlated_state(c, optimal_chi(c));
        const auto g = gibbs_product(c);
        EXPECT_LT(max_entry(partial_trace(rho, Subsystem::A).matrix() - partial_trace(g, Subsystem::A).matrix()), 1e-14);
        EXPECT_LT(max_entry(partial_trace(rho, Subsystem::B).matrix() - partial_trace(g, Subsystem::B).matrix()), 1e-14);
        // rho_44 = l4 - l4 rounds to ~1e-17 and enters through sqrt(rho_11 rho_44).
        EXPECT_NEAR(oracle::wootters_concurrence(rho.matrix()), 2.0 * std::sqrt(lambda_weights(c).l4), 1e-7);
        EXPECT_GE(rho.eigenvalues().minCoeff(), -1e-12);
    }
}

TEST(FuelState, InfeasibleChiThrows) {
    const PairConfig c;
    CorrelationMatrix chi = optimal_chi(c);
    chi.chi23 *= 1.01;
    EXPECT_FALSE(chi.feasible(lambda_weights(c)));
    EXPECT_THROW(correlated_state(c, chi), feasibility_error);
    CorrelationMatrix low{-lambda_weights(c).l4 - 1e-3, 0.0};
    EXPECT_THROW(correlated_state(c, low), feasibility_error);
}

TEST(FuelState, BruteForceSearchFindsOptimum) {
    for (auto [ta, tb] : {std::pair{2.0, 1.0}, {1.0, 1.0}, {0.7, 2.5}}) {
        const PairConfig c = PairConfig::with_delta(-pi / 2, ta, tb);
        const auto best = brute_force_max_concurrence(c, 150);
        EXPECT_NEAR(best.c_max, optimal_concurrence(c), 1e-2);
        EXPECT_LE(best.c_max, optimal_concurrence(c) + 1e-12);
    }
}

TEST(FuelState, BruteForceSliceAndGuards) {
    const PairConfig c;
    const double l4 = lambda_weights(c).l4;
    EXPECT_NEAR(brute_force_max_concurrence(c, 400, -l4).c_max, 2.0 * std::sqrt(l4), 1e-12);
    EXPECT_THROW(brute_force_max_concurrence(c, 10), std::invalid_argument);
    EXPECT_THROW(brute_force_max_concurrence(c, 200, 1.0), feasibility_error);
}

// ---- closed-form solution ----

TEST(ClosedForm, MatchesMatrixExponentialOracle) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> temp(0.5, 3.0), phase(-pi, pi), om(0.02, 0.5);
    for (int trial = 0; trial < 20; ++trial) {
        PairConfig c = PairConfig::with_delta(phase(rng), temp(rng), temp(rng), om(rng));
        c.phi_v = phase(rng);
        c.phi_chi = c.phi_v - phase(rng);
        const auto rho0 = correlated_state(c, optimal_chi(c));
        const auto h = pair_hamiltonian_oracle(c);
        for (double t : {0.0, 1.3, 7.7, 25.0, 100.0}) {
            const auto expected = oracle::unitary_evolve(h, rho0.matrix(), t);
            EXPECT_LT(max_entry(exact_closed_state(c, t).matrix() - expected), 1e-12) << "trial " << trial << " t " << t;
            EXPECT_NEAR(exact_sed(c, t), expected(2, 2).real() - expected(1, 1).real(), 1e-12);
        }
    }
}

TEST(ClosedForm, InitialSlopeMatchesFiniteDifference) {
    for (double delta : {-pi / 2, -1.0, 0.0, 0.4, pi / 2}) {
        const PairConfig c = PairConfig::with_delta(delta);
        const double h = 1e-4;
        const double fd = (exact_sed(c, h) - exact_sed(c, -h)) / (2.0 * h);
        EXPECT_NEAR(initial_sed_slope(c, optimal_chi(c)), fd, 1e-8) << "delta " << delta;
    }
}

TEST(ClosedForm, FirstMaximumTimeAndAmplitude) {
    const PairConfig c = PairConfig::with_delta(-pi / 2);
    const double d0 = initial_sed(c), c0 = optimal_concurrence(c);
    const double t_star = first_sed_maximum_time(c);
    EXPECT_NEAR(t_star, std::abs(sed_phase(c)) / (2.0 * c.omega), 1e-12);
    EXPECT_NEAR(t_star, std::atan(c0 / d0) / (2.0 * c.omega), 1e-12);
    EXPECT_NEAR(exact_sed(c, t_star), std::hypot(d0, c0), 1e-12);
}

TEST(ClosedForm, ThetaLimitWithEqualTemperatures) {
    const PairConfig c = PairConfig::with_delta(-pi / 2, 1.5, 1.5);
    EXPECT_EQ(initial_sed(c), 0.0);
    EXPECT_NEAR(sed_phase(c), -pi / 2, 1e-15);
    EXPECT_NEAR(exact_sed(c, pi / (4.0 * c.omega)), optimal_concurrence(c), 1e-12);
}

// SED initially rises above its starting value iff delta lies in (-pi, 0).
TEST(ClosedForm, AnomalousExchangeCondition) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> temp(0.5, 3.0), phase(-pi, pi);
    for (int trial = 0; trial < 100; ++trial) {
        const double delta = phase(rng);
        if (std::abs(std::sin(delta)) < 0.05) continue;
        const PairConfig c = PairConfig::with_delta(delta, temp(rng), temp(rng));
        const double d0 = exact_sed(c, 0.0);
        const double early = exact_sed(c, 1e-4 / c.omega);
        EXPECT_EQ(early > d0, delta < 0.0) << "delta " << delta;
    }
}

TEST(ClosedForm, InteractionEnergyIsConserved) {
    const PairConfig c = PairConfig::with_delta(-1.1);
    const auto v = interaction_hamiltonian(c);
    const auto h = pair_hamiltonian(c);
    const double v0 = v.expectation(exact_closed_state(c, 0.0));
    EXPECT_NEAR(v0, c.omega * optimal_concurrence(c) * std::cos(c.delta()), 1e-14);
    const double e0 = h.expectation(exact_closed_state(c, 0.0));
    for (double t : {3.0, 11.0, 40.0}) {
        EXPECT_NEAR(h.expectation(exact_closed_state(c, t)), e0, 1e-13);
        EXPECT_NEAR(v.expectation(exact_closed_state(c, t)), v0, 1e-13);
    }
}

// ---- numerical propagation ----

TEST(Lvn, AgreesWithClosedForm) {
    const PairConfig c = PairConfig::with_delta(-pi / 2);
    const auto rho0 = correlated_state(c, optimal_chi(c));
    const auto run = integrate_lvn(c, rho0, 0.01, 2.0 * pi / c.omega, 50);
    ASSERT_EQ(run.states.size(), run.trace.times.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < run.states.size(); ++i)
        worst = std::max(worst, max_entry(run.states[i].matrix() - exact_closed_state(c, run.trace.times[i]).matrix()));
    EXPECT_LT(worst, 1e-9);
    EXPECT_NEAR(run.trace.times.back(), 2.0 * pi / c.omega, 1e-12);
}

TEST(Lvn, GenericHamiltonianOverload) {
    std::mt19937_64 rng(24);
    const oracle::Mat g = oracle::random_state(rng, 4);
    const oracle::Mat h = 3.0 * (g + g.adjoint());
    const DensityOperator rho0{oracle::random_state(rng, 4)};
    const HermitianObservable ham(h);
    const double dt = 0.01 / h.operatorNorm();
    const auto run = integrate_lvn(ham, rho0, dt, 2.0, 1000000);
    EXPECT_LT(max_entry(run.states.back().matrix() - oracle::unitary_evolve(h, rho0.matrix(), 2.0)), 1e-9);
}

TEST(Lvn, StepGuard) {
    const PairConfig c;
    const auto rho0 = gibbs_product(c);
    EXPECT_THROW(integrate_lvn(c, rho0, 0.2, 1.0), step_size_error);
    EXPECT_NO_THROW(integrate_lvn(c, rho0, 0.1, 1.0));
}

// Without initial correlation the SED only oscillates below its initial value.
TEST(Lvn, UncorrelatedStateGivesNormalExchange) {
    const PairConfig c;
    const auto run = integrate_lvn(c, gibbs_product(c), 0.01, 2.0 * pi / c.omega, 100);
    for (std::size_t i = 0; i < run.trace.times.size(); ++i)
        EXPECT_NEAR(run.trace.sed[i], initial_sed(c) * std::cos(2.0 * c.omega * run.trace.times[i]), 1e-10);
}
