// test_qstate.cpp - density operators, entropies and concurrence against oracles

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcorr/qstate.hpp"

using namespace qcorr;

namespace {

DensityOperator bell_phi_plus() {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
    return DensityOperator::pure(psi);
}

} // namespace

// ---- construction ----

TEST(DensityOperator, RejectsNonHermitian) {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2) * 0.5;
    m(0, 1) = 0.1;
    EXPECT_THROW(DensityOperator{m}, invariant_error);
}

TEST(DensityOperator, RejectsWrongTrace) {
    EXPECT_THROW(DensityOperator{ComplexMatrix::Identity(2, 2)}, invariant_error);
}

TEST(DensityOperator, RejectsNegativeEigenvalue) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.2;
    m(1, 1) = -0.2;
    EXPECT_THROW(DensityOperator{m}, invariant_error);
}

TEST(DensityOperator, RejectsNonSquare) {
    EXPECT_THROW(DensityOperator{ComplexMatrix::Zero(2, 3)}, error);
}

TEST(DensityOperator, MaximallyMixedIsValid) {
    const auto rho = DensityOperator::maximally_mixed(4);
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-15);
    EXPECT_NEAR(von_neumann_entropy(rho), std::log(4.0), 1e-14);
}

// ---- partial trace ----

TEST(PartialTrace, MatchesIndexSumOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityOperator rho{oracle::random_state(rng, 4)};
        EXPECT_LT((partial_trace(rho, Subsystem::A).matrix() - oracle::trace_out_b(rho.matrix())).norm(), 1e-14);
        EXPECT_LT((partial_trace(rho, Subsystem::B).matrix() - oracle::trace_out_a(rho.matrix())).norm(), 1e-14);
    }
}

TEST(PartialTrace, ProductStateFactorizes) {
    std::mt19937_64 rng(12);
    const DensityOperator a{oracle::random_state(rng, 2)};
    const DensityOperator b{oracle::random_state(rng, 2)};
    const auto ab = tensor_product(a, b);
    EXPECT_LT((partial_trace(ab, Subsystem::A).matrix() - a.matrix()).norm(), 1e-14);
    EXPECT_LT((partial_trace(ab, Subsystem::B).matrix() - b.matrix()).norm(), 1e-14);
    EXPECT_NEAR(mutual_information(ab), 0.0, 1e-12);
}

TEST(PartialTrace, RejectsWrongDimension) {
    EXPECT_THROW(partial_trace(DensityOperator::maximally_mixed(2), Subsystem::A), dimension_error);
}

// ---- entropies ----

TEST(Entropy, BellStateValues) {
    const auto bell = bell_phi_plus();
    EXPECT_NEAR(von_neumann_entropy(bell), 0.0, 1e-12);
    EXPECT_NEAR(mutual_information(bell), 2.0 * std::log(2.0), 1e-12);
}

TEST(Entropy, RandomStatesMatchOracle) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityOperator rho{oracle::random_state(rng, 4)};
        EXPECT_NEAR(von_neumann_entropy(rho), oracle::entropy(rho.matrix()), 1e-12);
        EXPECT_NEAR(mutual_information(rho), oracle::mutual_information(rho.matrix()), 1e-12);
    }
}

TEST(Entropy, MutualInformationIsNonNegativeAndBounded) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        const DensityOperator rho{oracle::random_state(rng, 4, 1 + trial % 4)};
        const double i = mutual_information(rho);
        EXPECT_GE(i, -1e-12);
        EXPECT_LE(i, 2.0 * std::log(2.0) + 1e-12);
    }
}

TEST(RelativeEntropy, ZeroOnlyForEqualStates) {
    std::mt19937_64 rng(15);
    const DensityOperator a{oracle::random_state(rng, 2)};
    const DensityOperator b{oracle::random_state(rng, 2)};
    EXPECT_NEAR(relative_entropy(a, a), 0.0, 1e-12);
    EXPECT_GT(relative_entropy(a, b), 0.0);
}

TEST(RelativeEntropy, DiagonalClosedForm) {
    ComplexMatrix p = ComplexMatrix::Zero(2, 2), q = ComplexMatrix::Zero(2, 2);
    p(0, 0) = 0.7;
    p(1, 1) = 0.3;
    q(0, 0) = 0.4;
    q(1, 1) = 0.6;
    const double expected = 0.7 * std::log(0.7 / 0.4) + 0.3 * std::log(0.3 / 0.6);
    EXPECT_NEAR(relative_entropy(DensityOperator{p}, DensityOperator{q}), expected, 1e-13);
}

TEST(RelativeEntropy, OutsideSupportThrows) {
    Eigen::VectorXcd up(2), down(2);
    up << 1.0, 0.0;
    down << 0.0, 1.0;
    EXPECT_THROW(relative_entropy(DensityOperator::pure(up), DensityOperator::pure(down)), support_error);
}

// ---- concurrence ----

TEST(Concurrence, BellAndProductStates) {
    EXPECT_NEAR(concurrence(bell_phi_plus()), 1.0, 1e-12);
    EXPECT_NEAR(concurrence(DensityOperator::maximally_mixed(4)), 0.0, 1e-12);
}

TEST(Concurrence, RandomStatesMatchWoottersOracle) {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 200; ++trial) {
        const DensityOperator rho{oracle::random_state(rng, 4, 1 + trial % 4)};
        EXPECT_NEAR(concurrence(rho), oracle::wootters_concurrence(rho.matrix()), 1e-9) << "trial " << trial;
    }
}

TEST(Concurrence, XStateFormulaAgreesOnXStates) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        double d[4];
        double sum = 0.0;
        for (double& x : d) sum += (x = u(rng));
        for (double& x : d) x /= sum;
        ComplexMatrix m = ComplexMatrix::Zero(4, 4);
        for (int i = 0; i < 4; ++i) m(i, i) = d[i];
        const cplx c23 = std::polar(u(rng) * std::sqrt(d[1] * d[2]), 6.28 * u(rng));
        const cplx c14 = std::polar(u(rng) * std::sqrt(d[0] * d[3]), 6.28 * u(rng));
        m(1, 2) = c23;
        m(2, 1) = std::conj(c23);
        m(0, 3) = c14;
        m(3, 0) = std::conj(c14);
        const DensityOperator rho{m};
        EXPECT_NEAR(x_state_concurrence(rho), oracle::wootters_concurrence(m), 1e-9);
        EXPECT_NEAR(x_state_concurrence(rho), concurrence(rho), 1e-9);
    }
}

// ---- Gibbs states and distances ----

TEST(Gibbs, QubitPopulations) {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = -0.5;
    h(1, 1) = 0.5;
    const double beta = 0.7;
    const auto g = gibbs_state(beta, HermitianObservable(h));
    EXPECT_NEAR(g(0, 0).real(), 1.0 / (1.0 + std::exp(-beta)), 1e-14);
    EXPECT_NEAR(g(1, 1).real(), 1.0 / (1.0 + std::exp(beta)), 1e-14);
}

TEST(Gibbs, ZeroTemperatureIsGroundProjector) {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = -0.5;
    h(1, 1) = 0.5;
    const auto g = gibbs_state(std::numeric_limits<double>::infinity(), HermitianObservable(h));
    EXPECT_NEAR(g(0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(g(1, 1).real(), 0.0, 1e-15);
}

TEST(TraceDistance, MetricProperties) {
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityOperator a{oracle::random_state(rng, 4)};
        const DensityOperator b{oracle::random_state(rng, 4)};
        const DensityOperator c{oracle::random_state(rng, 4)};
        EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-13);
        EXPECT_NEAR(trace_distance(a, b), trace_distance(b, a), 1e-13);
        EXPECT_LE(trace_distance(a, c), trace_distance(a, b) + trace_distance(b, c) + 1e-13);
        EXPECT_LE(trace_distance(a, b), 1.0 + 1e-13);
    }
}
