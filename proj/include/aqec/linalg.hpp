#pragma once

#include <Eigen/Dense>
#include <complex>

// Dense complex linear algebra sized for small multi-qubit Hilbert spaces
// (dim <= 2^8). Everything here is exact-ish: eigendecomposition-based
// exponentials, deterministic eigenvector phases.

namespace aqec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Unit-norm state vector of dimension 2^n.
using QuantumState = ComplexVector;

enum class PauliKind { X, Z, ZZ };

// Eigendecomposition of a Hermitian matrix: ascending eigenvalues,
// eigenvector columns with a deterministic phase (first component of
// magnitude > tol made real-positive).
struct HermEigen {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;
};

// max |A - A^dagger| over entries.
double hermiticity_error(const ComplexMatrix& a);

// Throws std::invalid_argument if a is not Hermitian within tol.
void require_hermitian(const ComplexMatrix& a, double tol = 1e-10);

// Kronecker product, row-major logical ordering:
// out[(i*db+k),(j*db+l)] = a(i,j)*b(k,l).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix pauli_x();
ComplexMatrix pauli_z();
ComplexMatrix identity2();

// 2^n-dimensional operator with the named Pauli on `site` (and site+1 for
// ZZ) and identity elsewhere. Site 0 is the leftmost Kronecker factor.
// ZZ pairs are nearest-neighbor only: the pair is (site, site+1).
ComplexMatrix pauli_chain_op(PauliKind kind, int site, int n);

// Hermitian eigendecomposition with deterministic ordering and phases.
HermEigen herm_eig(const ComplexMatrix& a);

// exp(-i h dt) via eigendecomposition (hbar = 1).
ComplexMatrix expm_minus_i(const ComplexMatrix& h, double dt);

// Hilbert-Schmidt (L2) distance Tr((a-b)^2) between Hermitian matrices.
// Computed as the squared Frobenius norm of (a-b), which is the same
// quantity and is exactly symmetric and nonnegative.
double hs_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace aqec
