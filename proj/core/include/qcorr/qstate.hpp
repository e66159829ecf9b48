// qstate.hpp - dense density-matrix algebra and information-theoretic functionals
//
// Two-qubit states use the basis {|00>, |01>, |10>, |11>} with the left factor
// belonging to qubit A. Energies are in units of hbar*omega and k_B = 1.

#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qcorr/errors.hpp"

namespace qcorr {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr cplx I_unit{0.0, 1.0};

enum class Subsystem { A, B };

struct StateTolerance {
    double hermiticity = 1e-12;    // max |rho - rho^dagger| entrywise
    double trace = 1e-12;          // |Tr rho - 1|
    double min_eigenvalue = -1e-10;

    // For states extracted from long dissipative propagations.
    static constexpr StateTolerance relaxed() { return {1e-8, 1e-8, -1e-6}; }
};

/// Hermitian, unit-trace, positive semidefinite matrix. Validated on construction.
class DensityOperator {
public:
    explicit DensityOperator(ComplexMatrix elements, const StateTolerance& tol = {});

    static DensityOperator maximally_mixed(Eigen::Index dim);
    static DensityOperator pure(const Eigen::VectorXcd& psi);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return m_; }
    cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    // Ascending.
    Eigen::VectorXd eigenvalues() const;

private:
    ComplexMatrix m_;
};

class HermitianObservable {
public:
    explicit HermitianObservable(ComplexMatrix elements, double tol = 1e-12);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return m_; }

    double expectation(const DensityOperator& rho) const;

private:
    ComplexMatrix m_;
};

namespace pauli {
Eigen::Matrix2cd identity();
Eigen::Matrix2cd x();
Eigen::Matrix2cd y();
Eigen::Matrix2cd z();
} // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b);

// Embed a single-qubit operator on the given qubit of the pair.
ComplexMatrix embed(const ComplexMatrix& op, Subsystem on);

ComplexMatrix hermitian_part(const ComplexMatrix& m);

DensityOperator partial_trace(const DensityOperator& rho, Subsystem keep);

// Entropies use the natural logarithm; eigenvalues below 1e-14 contribute 0.
double von_neumann_entropy(const DensityOperator& rho);

// Throws support_error if supp(rho) is not contained in supp(sigma).
double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);

double mutual_information(const DensityOperator& rho);

// Wootters spin-flip formula, valid for any two-qubit state.
double concurrence(const DensityOperator& rho);

// Closed form 2 max{0, |r23| - sqrt(r11 r44), |r14| - sqrt(r22 r33)} for X states.
double x_state_concurrence(const DensityOperator& rho);

// beta may be +infinity (ground-state projector, uniform over a degenerate ground space).
DensityOperator gibbs_state(double beta, const HermitianObservable& h);

double trace_distance(const DensityOperator& a, const DensityOperator& b);

} // namespace qcorr
