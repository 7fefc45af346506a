#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>

#include "entroq/errors.hpp"

namespace entroq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Tolerances shared across the library.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kEntropyEigCutoff = 1e-12;

/// Max-entry deviation of m from its adjoint.
double hermiticity_defect(const ComplexMatrix& m);

/// Hermitian, positive semidefinite, unit-trace matrix.
///
/// Construction validates all three properties (Hermiticity within 1e-10
/// entrywise, trace within 1e-10 of one, smallest eigenvalue >= -1e-10) and
/// throws NotHermitian / InvariantViolation when they fail. Instances are
/// immutable values. When the dimension is a power of two the qubit count is
/// recorded.
class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix m);

    const ComplexMatrix& matrix() const { return matrix_; }
    Eigen::Index dim() const { return matrix_.rows(); }
    std::optional<int> num_qubits() const { return num_qubits_; }

  private:
    ComplexMatrix matrix_;
    std::optional<int> num_qubits_;
};

/// Eigensystem of a Hermitian matrix: ascending real eigenvalues and the
/// unitary matrix of column eigenvectors.
struct Spectrum {
    Eigen::VectorXd eigenvalues;
    ComplexMatrix eigenvectors;
};

/// Kronecker product with `a` as the outer factor:
/// result(i*dimB+k, j*dimB+l) = a(i,j) * b(k,l).
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Throws NotHermitian unless m is Hermitian within 1e-10.
Spectrum hermitian_eigendecompose(const ComplexMatrix& m);

/// -tr(rho ln rho) in nats. Eigenvalues at or below 1e-12 contribute zero.
double von_neumann_entropy(const DensityMatrix& rho);

/// Sum of absolute eigenvalues. x must be Hermitian within 1e-10.
double trace_norm(const ComplexMatrix& x);

/// Trace norm of a state: tiny negative eigenvalues (within the PSD floor)
/// count as zero, so the result is the trace of the clipped spectrum.
double trace_norm(const DensityMatrix& rho);

/// Hilbert-Schmidt (Frobenius) norm, sqrt of the entrywise absolute square sum.
double hs_norm(const ComplexMatrix& x);

/// Random state of rank at most `rank`, built as G G* / tr(G G*) from a
/// dim x rank complex standard-Gaussian matrix. Deterministic per seed.
DensityMatrix random_density(int dim, int rank, std::uint64_t seed);

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the R
/// diagonal's phases folded into Q. Deterministic per seed.
ComplexMatrix random_haar_unitary(int dim, std::uint64_t seed);

/// I/dim.
DensityMatrix maximally_mixed(int dim);

/// |index><index| in the computational basis.
DensityMatrix pure_basis_state(int dim, int index = 0);

}  // namespace entroq
