#include "entroq/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <random>
#include <utility>

namespace entroq {

namespace {

bool is_power_of_two(Eigen::Index v) {
    return v > 0 && (v & (v - 1)) == 0;
}

int log2_exact(Eigen::Index v) {
    int n = 0;
    while ((Eigen::Index{1} << n) < v) ++n;
    return n;
}

// Entries drawn row-major, real part before imaginary part, so a seed pins
// the matrix bit-for-bit.
ComplexMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    ComplexMatrix g(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double re = n01(rng);
            const double im = n01(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("eigenvalue computation failed");
    return es.eigenvalues();
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() < 1 || matrix_.rows() != matrix_.cols())
        throw InvariantViolation("density matrix must be square and nonempty");
    if (hermiticity_defect(matrix_) > kHermitianTol)
        throw NotHermitian("density matrix is not Hermitian within 1e-10");
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol)
        throw InvariantViolation("density matrix trace is " + std::to_string(tr) +
                                 ", must be 1 within 1e-10");
    if (hermitian_eigenvalues(matrix_)(0) < kEigenvalueFloor)
        throw InvariantViolation("density matrix has an eigenvalue below -1e-10");
    if (is_power_of_two(dim())) num_qubits_ = log2_exact(dim());
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    return Eigen::kroneckerProduct(a, b);
}

Spectrum hermitian_eigendecompose(const ComplexMatrix& m) {
    if (m.rows() < 1 || m.rows() != m.cols())
        throw NotHermitian("matrix must be square and nonempty");
    if (hermiticity_defect(m) > kHermitianTol)
        throw NotHermitian("matrix is not Hermitian within 1e-10");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
    return Spectrum{es.eigenvalues(), es.eigenvectors()};
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const Eigen::VectorXd lambda = hermitian_eigendecompose(rho.matrix()).eigenvalues;
    double s = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) > kEntropyEigCutoff) s -= lambda(i) * std::log(lambda(i));
    }
    return std::max(s, 0.0);
}

double trace_norm(const ComplexMatrix& x) {
    const Eigen::VectorXd lambda = hermitian_eigendecompose(x).eigenvalues;
    return lambda.cwiseAbs().sum();
}

double trace_norm(const DensityMatrix& rho) {
    const Eigen::VectorXd lambda = hermitian_eigendecompose(rho.matrix()).eigenvalues;
    return lambda.cwiseMax(0.0).sum();
}

double hs_norm(const ComplexMatrix& x) {
    return x.norm();
}

DensityMatrix random_density(int dim, int rank, std::uint64_t seed) {
    if (dim < 1 || rank < 1 || rank > dim)
        throw BadRank("rank must lie in [1, dim], got rank=" + std::to_string(rank) +
                      " dim=" + std::to_string(dim));
    std::mt19937_64 rng(seed);
    const ComplexMatrix g = ginibre(dim, rank, rng);
    ComplexMatrix s = g * g.adjoint();
    s /= s.trace().real();
    s = 0.5 * (s + s.adjoint().eval());
    return DensityMatrix(std::move(s));
}

ComplexMatrix random_haar_unitary(int dim, std::uint64_t seed) {
    if (dim < 1) throw Error("unitary dimension must be >= 1");
    std::mt19937_64 rng(seed);
    const ComplexMatrix a = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    ComplexMatrix q = qr.householderQ();
    const Eigen::VectorXcd rdiag = qr.matrixQR().diagonal();
    for (int i = 0; i < dim; ++i) {
        const double mag = std::abs(rdiag(i));
        q.col(i) *= (mag > 0.0) ? rdiag(i) / mag : Complex(1.0, 0.0);
    }
    return q;
}

DensityMatrix maximally_mixed(int dim) {
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix pure_basis_state(int dim, int index) {
    if (index < 0 || index >= dim) throw BadIndex("basis index outside [0, dim)");
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(index, index) = Complex(1.0, 0.0);
    return DensityMatrix(std::move(m));
}

}  // namespace entroq
