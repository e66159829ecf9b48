#include "qcorr/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qcorr {

namespace {

constexpr double entropy_floor = 1e-14;
constexpr double support_floor = 1e-12;

double max_antihermitian(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::SelfAdjointEigenSolver<ComplexMatrix> diagonalize(const ComplexMatrix& m) {
    // The solver only reads the lower triangle; symmetrize first so tiny
    // anti-Hermitian noise does not bias the spectrum.
    return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(hermitian_part(m));
}

double xlogx_sum(const Eigen::VectorXd& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) > entropy_floor) s += p(i) * std::log(p(i));
    }
    return s;
}

} // namespace

// --------------------------- DensityOperator ---------------------------------

DensityOperator::DensityOperator(ComplexMatrix elements, const StateTolerance& tol)
    : m_(std::move(elements)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols())
        throw dimension_error("DensityOperator: matrix must be square and non-empty");
    if (!m_.allFinite())
        throw invariant_error("DensityOperator: non-finite entries");

    const double herm = max_antihermitian(m_);
    if (herm > tol.hermiticity) {
        std::ostringstream os;
        os << "DensityOperator: not Hermitian (max |rho - rho^dag| = " << herm << ")";
        throw invariant_error(os.str());
    }
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > tol.trace) {
        std::ostringstream os;
        os << "DensityOperator: trace " << tr << " differs from 1";
        throw invariant_error(os.str());
    }
    const double lmin = diagonalize(m_).eigenvalues().minCoeff();
    if (lmin < tol.min_eigenvalue) {
        std::ostringstream os;
        os << "DensityOperator: negative eigenvalue " << lmin;
        throw invariant_error(os.str());
    }
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index dim) {
    if (dim <= 0) throw dimension_error("maximally_mixed: dim must be positive");
    return DensityOperator(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& psi) {
    const double n = psi.norm();
    if (!(n > 0.0)) throw invariant_error("pure: zero vector");
    const Eigen::VectorXcd v = psi / n;
    return DensityOperator(v * v.adjoint());
}

Eigen::VectorXd DensityOperator::eigenvalues() const {
    return diagonalize(m_).eigenvalues();
}

// --------------------------- HermitianObservable -----------------------------

HermitianObservable::HermitianObservable(ComplexMatrix elements, double tol)
    : m_(std::move(elements)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols())
        throw dimension_error("HermitianObservable: matrix must be square and non-empty");
    if (max_antihermitian(m_) > tol)
        throw invariant_error("HermitianObservable: not Hermitian");
}

double HermitianObservable::expectation(const DensityOperator& rho) const {
    if (rho.dim() != dim())
        throw dimension_error("expectation: dimension mismatch");
    return (m_ * rho.matrix()).trace().real();
}

// --------------------------- Pauli / tensor helpers --------------------------

namespace pauli {
Eigen::Matrix2cd identity() { return Eigen::Matrix2cd::Identity(); }
Eigen::Matrix2cd x() {
    Eigen::Matrix2cd m;
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}
Eigen::Matrix2cd y() {
    Eigen::Matrix2cd m;
    m << 0.0, -I_unit,
         I_unit, 0.0;
    return m;
}
Eigen::Matrix2cd z() {
    Eigen::Matrix2cd m;
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}
} // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
    return DensityOperator(kron(a.matrix(), b.matrix()));
}

ComplexMatrix embed(const ComplexMatrix& op, Subsystem on) {
    if (op.rows() != 2 || op.cols() != 2)
        throw dimension_error("embed: expected a single-qubit operator");
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    return on == Subsystem::A ? kron(op, id) : kron(id, op);
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
    return 0.5 * (m + m.adjoint());
}

// --------------------------- Reductions --------------------------------------

DensityOperator partial_trace(const DensityOperator& rho, Subsystem keep) {
    if (rho.dim() != 4) throw dimension_error("partial_trace: expected a two-qubit (dim 4) state");
    const ComplexMatrix& m = rho.matrix();
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    // index = 2*a + b
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                out(i, j) += keep == Subsystem::A ? m(2 * i + k, 2 * j + k)
                                                  : m(2 * k + i, 2 * k + j);
            }
        }
    }
    // Inherit the tolerance of the parent: the marginal is at least as clean.
    return DensityOperator(hermitian_part(out), StateTolerance::relaxed());
}

double von_neumann_entropy(const DensityOperator& rho) {
    return std::max(0.0, -xlogx_sum(rho.eigenvalues()));
}

double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim()) throw dimension_error("relative_entropy: dimension mismatch");
    const auto er = diagonalize(rho.matrix());
    const auto es = diagonalize(sigma.matrix());
    const Eigen::VectorXd& p = er.eigenvalues();
    const Eigen::VectorXd& q = es.eigenvalues();
    // overlap(i, j) = |<r_i|s_j>|^2
    const Eigen::MatrixXd overlap = (er.eigenvectors().adjoint() * es.eigenvectors()).cwiseAbs2();

    double cross = 0.0;
    for (Eigen::Index j = 0; j < q.size(); ++j) {
        double weight = 0.0;
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (p(i) > entropy_floor) weight += p(i) * overlap(i, j);
        }
        if (q(j) < support_floor) {
            if (weight > support_floor) {
                std::ostringstream os;
                os << "relative_entropy: rho has weight " << weight
                   << " outside the support of sigma (infinite relative entropy)";
                throw support_error(os.str());
            }
            continue;
        }
        cross += weight * std::log(q(j));
    }
    return xlogx_sum(p) - cross;
}

double mutual_information(const DensityOperator& rho) {
    if (rho.dim() != 4) throw dimension_error("mutual_information: expected a two-qubit state");
    return von_neumann_entropy(partial_trace(rho, Subsystem::A))
         + von_neumann_entropy(partial_trace(rho, Subsystem::B))
         - von_neumann_entropy(rho);
}

// --------------------------- Entanglement ------------------------------------

double concurrence(const DensityOperator& rho) {
    if (rho.dim() != 4) throw dimension_error("concurrence: expected a two-qubit state");
    const Eigen::Matrix4cd m = rho.matrix();
    const Eigen::Matrix4cd yy = kron(pauli::y(), pauli::y());

    // The lambdas are the singular values of sqrt(rho) sqrt(flipped rho); the
    // flipped square root is yy conj(sqrt(rho)) yy since yy is real and unitary.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (m + m.adjoint()));
    const Eigen::Vector4d lam = es.eigenvalues().cwiseMax(0.0);
    const Eigen::Matrix4cd sqrt_rho =
        es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    const Eigen::Matrix4cd sqrt_flipped = yy * sqrt_rho.conjugate() * yy;
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(sqrt_rho * sqrt_flipped);
    Eigen::Vector4d mu = svd.singularValues();
    std::sort(mu.data(), mu.data() + 4, std::greater<>());
    return std::max(0.0, mu(0) - mu(1) - mu(2) - mu(3));
}

double x_state_concurrence(const DensityOperator& rho) {
    if (rho.dim() != 4) throw dimension_error("x_state_concurrence: expected a two-qubit state");
    const auto& m = rho.matrix();
    const double a = std::abs(m(1, 2)) - std::sqrt(std::max(0.0, m(0, 0).real() * m(3, 3).real()));
    const double b = std::abs(m(0, 3)) - std::sqrt(std::max(0.0, m(1, 1).real() * m(2, 2).real()));
    return 2.0 * std::max({0.0, a, b});
}

// --------------------------- Thermal states -----------------------------------

DensityOperator gibbs_state(double beta, const HermitianObservable& h) {
    if (std::isnan(beta) || beta < 0.0) throw invariant_error("gibbs_state: beta must be >= 0");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h.matrix()));
    const Eigen::VectorXd& e = es.eigenvalues();
    const double e0 = e.minCoeff();
    Eigen::VectorXd w(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        const double gap = e(i) - e0;
        if (std::isinf(beta)) {
            w(i) = gap < 1e-12 ? 1.0 : 0.0;
        } else {
            w(i) = std::exp(-beta * gap);
        }
    }
    w /= w.sum();
    ComplexMatrix rho = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    return DensityOperator(hermitian_part(rho));
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
    if (a.dim() != b.dim()) throw dimension_error("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a.matrix() - b.matrix()),
                                                   Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

} // namespace qcorr
