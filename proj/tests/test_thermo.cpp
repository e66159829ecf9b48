// test_thermo.cpp - entropy productions, the closed-system identity and COP bookkeeping

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcorr/heom.hpp"
#include "qcorr/thermo.hpp"

using namespace qcorr;

namespace {

constexpr double pi = std::numbers::pi;

// Random feasible chi for the given weights.
CorrelationMatrix random_chi(std::mt19937_64& rng, const LambdaWeights& w) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = -w.l4 + u(rng) * (std::min(w.l2, w.l3) + w.l4);
    const double r = u(rng) * std::sqrt((w.l2 - x) * (w.l3 - x));
    return {x, std::polar(r, 2.0 * pi * u(rng))};
}

} // namespace

// ---- entropy production ----

TEST(Snapshot, ReferenceHasZeroProduction) {
    const PairConfig cfg;
    const auto rho0 = correlated_state(cfg, optimal_chi(cfg));
    const auto ref = reference_snapshot(rho0);
    const auto s = snapshot(0.0, rho0, 0.0, 0.0, cfg, ref);
    EXPECT_EQ(s.Sigma0, 0.0);
    EXPECT_EQ(s.Sigma, 0.0);
    EXPECT_NEAR(s.I_AB, oracle::mutual_information(rho0.matrix()), 1e-12);
}

TEST(Snapshot, DifferenceIsMutualInformationChange) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> q(-0.3, 0.3);
    const PairConfig cfg;
    for (int trial = 0; trial < 100; ++trial) {
        const DensityOperator rho0{oracle::random_state(rng, 4)};
        const DensityOperator rho{oracle::random_state(rng, 4)};
        const auto s = snapshot(1.0, rho, q(rng), q(rng), cfg, reference_snapshot(rho0));
        EXPECT_NEAR(s.Sigma0 - s.Sigma,
                    oracle::mutual_information(rho.matrix()) - oracle::mutual_information(rho0.matrix()), 1e-10);
    }
}

TEST(Snapshot, BathEntropyUsesHeatLeavingTheBath) {
    const PairConfig cfg;  // T_A = 2, T_B = 1
    const auto rho = gibbs_product(cfg);
    const auto s = snapshot(1.0, rho, 0.2, -0.1, cfg, reference_snapshot(rho));
    EXPECT_NEAR(s.Sigma, -0.2 / 2.0 + 0.1 / 1.0, 1e-15);
    EXPECT_NEAR(s.Sigma0, s.Sigma, 1e-15);
}

TEST(Snapshot, SeriesRejectsMismatchedLengths) {
    const PairConfig cfg;
    const auto rho = gibbs_product(cfg);
    EXPECT_THROW(thermo_series({0.0, 1.0}, {rho}, {0.0, 0.0}, {0.0, 0.0}, cfg), dimension_error);
}

// ---- closed-system identity ----

TEST(Eq2, HoldsForRandomCorrelationsUnderUnitaryEvolution) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> temp(0.5, 3.0), phase(-pi, pi), time(0.0, 60.0);
    for (int trial = 0; trial < 30; ++trial) {
        PairConfig cfg = PairConfig::with_delta(phase(rng), temp(rng), temp(rng));
        const auto rho0 = correlated_state(cfg, random_chi(rng, lambda_weights(cfg)));
        const oracle::Mat h = pair_hamiltonian(cfg).matrix();
        for (int k = 0; k < 5; ++k) {
            const DensityOperator rho_t{oracle::unitary_evolve(h, rho0.matrix(), time(rng)), StateTolerance::relaxed()};
            const auto terms = eq2_decomposition(rho_t, rho0, cfg);
            EXPECT_NEAR(terms.residual(), 0.0, 1e-10) << "trial " << trial;
            EXPECT_GE(terms.rel_a, 0.0);
            EXPECT_GE(terms.rel_b, 0.0);
        }
    }
}

TEST(Eq2, RefusesDissipativeDynamics) {
    const PairConfig cfg;
    const auto rho = gibbs_product(cfg);
    EXPECT_THROW(eq2_decomposition(rho, rho, cfg, Dynamics::dissipative), invariant_error);
}

// With a thermal initial qubit the local Clausius gap is a relative entropy.
TEST(Clausius, GapEqualsRelativeEntropy) {
    std::mt19937_64 rng(33);
    const PairConfig cfg;
    const auto rho0 = gibbs_product(cfg);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityOperator rho_t{oracle::random_state(rng, 4)};
        for (auto which : {Subsystem::A, Subsystem::B}) {
            const double gap = local_clausius_gap(rho_t, rho0, cfg, which);
            EXPECT_NEAR(gap, relative_entropy(partial_trace(rho_t, which), partial_trace(rho0, which)), 1e-10);
            EXPECT_GE(gap, -1e-12);
        }
    }
}

// ---- COP ----

TEST(Cop, RatioAndCarnotBound) {
    const PairConfig cfg;  // T_A = 2, T_B = 1: bound T_B / (T_A - T_B) = 1
    CycleRecord cyc;
    cyc.Q_B_cycle = 0.05;
    const auto r = cop_report(cyc, 0.5, cfg);
    EXPECT_NEAR(r.cop_ratio, 0.05, 1e-15);
    EXPECT_NEAR(r.carnot, 1.0, 1e-15);
    EXPECT_TRUE(r.satisfied);
    EXPECT_FALSE(r.degenerate);

    cyc.Q_B_cycle = 1.5;
    EXPECT_FALSE(cop_report(cyc, 0.5, cfg).satisfied);
}

TEST(Cop, ZeroHeatAndZeroWork) {
    const PairConfig cfg;
    CycleRecord cyc;
    EXPECT_EQ(cop_report(cyc, 0.0, cfg).cop_ratio, 0.0);
    cyc.Q_B_cycle = 0.1;
    EXPECT_EQ(cop_report(cyc, 0.0, cfg).cop_ratio, std::numeric_limits<double>::infinity());
    EXPECT_THROW(cop_report(cyc, -1.0, cfg), std::invalid_argument);
}

TEST(Cop, DecouplingWorkEntersDenominator) {
    const PairConfig cfg;
    CycleRecord cyc;
    cyc.Q_B_cycle = 0.2;
    cyc.residual_V = -0.1;
    EXPECT_NEAR(cop_report(cyc, 0.5, cfg, true).cop_ratio, 0.2 / 1.1, 1e-15);
}

TEST(Cop, EqualTemperaturesAreDegenerate) {
    const PairConfig cfg = PairConfig::with_delta(-pi / 2, 1.5, 1.5);
    CycleRecord cyc;
    cyc.Q_B_cycle = 0.3;
    const auto r = cop_report(cyc, 0.1, cfg);
    EXPECT_TRUE(r.degenerate);
    EXPECT_TRUE(r.satisfied);
    EXPECT_TRUE(std::isinf(r.carnot));
}
