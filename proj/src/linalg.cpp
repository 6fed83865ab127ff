#include "aqec/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aqec {

double hermiticity_error(const ComplexMatrix& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("matrix is not square: " +
                                    std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()));
    }
    const double err = hermiticity_error(a);
    if (!(err < tol)) {
        throw std::invalid_argument("matrix is not Hermitian: max|A-A^dag| = " +
                                    std::to_string(err));
    }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Eigen::Index ra = a.rows(), ca = a.cols();
    const Eigen::Index rb = b.rows(), cb = b.cols();
    ComplexMatrix out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i)
        for (Eigen::Index j = 0; j < ca; ++j)
            out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
    return out;
}

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

ComplexMatrix identity2() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix pauli_chain_op(PauliKind kind, int site, int n) {
    if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
    const int last = (kind == PauliKind::ZZ) ? n - 2 : n - 1;
    if (site < 0 || site > last) {
        throw std::invalid_argument("pauli site " + std::to_string(site) +
                                    " out of range for n=" + std::to_string(n));
    }
    ComplexMatrix op = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
        ComplexMatrix factor;
        switch (kind) {
            case PauliKind::X:
                factor = (q == site) ? pauli_x() : identity2();
                break;
            case PauliKind::Z:
                factor = (q == site) ? pauli_z() : identity2();
                break;
            case PauliKind::ZZ:
                factor = (q == site || q == site + 1) ? pauli_z() : identity2();
                break;
        }
        op = kron(op, factor);
    }
    return op;
}

namespace {

// First component with magnitude above tol made real-positive.
void fix_column_phase(ComplexMatrix& v, Eigen::Index col) {
    const double tol = 1e-12;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const Complex c = v(i, col);
        if (std::abs(c) > tol) {
            v.col(col) *= std::conj(c) / std::abs(c);
            return;
        }
    }
}

}  // namespace

HermEigen herm_eig(const ComplexMatrix& a) {
    require_hermitian(a, 1e-10);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition failed");
    }
    HermEigen out;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
        fix_column_phase(out.eigenvectors, c);
    }
    return out;
}

ComplexMatrix expm_minus_i(const ComplexMatrix& h, double dt) {
    if (!std::isfinite(dt)) throw std::invalid_argument("dt must be finite");
    const HermEigen eig = herm_eig(h);
    const Eigen::Index d = h.rows();
    ComplexVector phases(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        phases(i) = std::exp(Complex(0.0, -eig.eigenvalues(i) * dt));
    }
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

double hs_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("hs_distance: dimension mismatch");
    }
    return (a - b).squaredNorm();
}

}  // namespace aqec
