#include <cmath>
#include <complex>

#include "doctest.h"
#include "entroq/linalg.hpp"
#include "test_support.hpp"

using entroq::ComplexMatrix;
using entroq::DensityMatrix;

TEST_CASE("tensor_product layout") {
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    CHECK(entroq::tensor_product(i2, i2).isApprox(ComplexMatrix::Identity(4, 4)));

    ComplexMatrix p(2, 2);
    p << 1, 0, 0, 0;
    const ComplexMatrix pp = entroq::tensor_product(p, p);
    CHECK(pp.rows() == 4);
    CHECK(pp(0, 0) == std::complex<double>(1, 0));
    CHECK(pp.cwiseAbs().sum() == doctest::Approx(1.0));

    // Kronecker index layout: (X (x) X)(i*2+k, j*2+l) = X(i,j) X(k,l)
    const ComplexMatrix xx = entroq::tensor_product(testsup::pauli_x(), testsup::pauli_x());
    CHECK(xx(0, 3) == std::complex<double>(1, 0));
    CHECK(xx(3, 0) == std::complex<double>(1, 0));
    CHECK(xx(0, 0) == std::complex<double>(0, 0));
}

TEST_CASE("hermitian_eigendecompose") {
    SUBCASE("already diagonal") {
        ComplexMatrix m(2, 2);
        m << 0.25, 0, 0, 0.75;
        const entroq::Spectrum s = entroq::hermitian_eigendecompose(m);
        CHECK(s.eigenvalues(0) == doctest::Approx(0.25));
        CHECK(s.eigenvalues(1) == doctest::Approx(0.75));
    }
    SUBCASE("projector onto the plus state") {
        const ComplexMatrix m = 0.5 * (ComplexMatrix::Identity(2, 2) + testsup::pauli_x());
        const entroq::Spectrum s = entroq::hermitian_eigendecompose(m);
        CHECK(s.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(s.eigenvalues(1) == doctest::Approx(1.0));
    }
    SUBCASE("identity") {
        const entroq::Spectrum s =
            entroq::hermitian_eigendecompose(ComplexMatrix::Identity(4, 4));
        for (int i = 0; i < 4; ++i) CHECK(s.eigenvalues(i) == doctest::Approx(1.0));
    }
    SUBCASE("eigenvalues ascend and reconstruction holds") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const ComplexMatrix m = entroq::random_density(8, 8, seed).matrix();
            const entroq::Spectrum s = entroq::hermitian_eigendecompose(m);
            for (int i = 1; i < 8; ++i) CHECK(s.eigenvalues(i) >= s.eigenvalues(i - 1));
            const ComplexMatrix rebuilt = s.eigenvectors *
                                          s.eigenvalues.cast<entroq::Complex>().asDiagonal() *
                                          s.eigenvectors.adjoint();
            CHECK((rebuilt - m).cwiseAbs().maxCoeff() <= 1e-9);
            CHECK(entroq::hs_norm(s.eigenvectors.adjoint() * s.eigenvectors -
                                  ComplexMatrix::Identity(8, 8)) <= 1e-9);
        }
    }
    SUBCASE("rejects non-Hermitian input") {
        ComplexMatrix m(2, 2);
        m << 0, 1, 0, 0;
        CHECK_THROWS_AS(entroq::hermitian_eigendecompose(m), entroq::NotHermitian);
    }
}

TEST_CASE("von_neumann_entropy") {
    CHECK(entroq::von_neumann_entropy(entroq::pure_basis_state(2)) == doctest::Approx(0.0));
    CHECK(entroq::von_neumann_entropy(entroq::maximally_mixed(8)) ==
          doctest::Approx(2.0794415416798357));
    CHECK(entroq::von_neumann_entropy(testsup::diag_state({0.25, 0.75})) ==
          doctest::Approx(0.5623351446188083));

    SUBCASE("range over random states") {
        for (int dim : {2, 4, 8}) {
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const double s =
                    entroq::von_neumann_entropy(entroq::random_density(dim, dim, seed));
                CHECK(s >= 0.0);
                CHECK(s <= std::log(dim) + 1e-12);
            }
        }
    }
    SUBCASE("invariant under unitary conjugation") {
        for (int dim : {2, 4, 8}) {
            const DensityMatrix rho = entroq::random_density(dim, dim, 11);
            const ComplexMatrix u = entroq::random_haar_unitary(dim, 12);
            const DensityMatrix rotated(ComplexMatrix(u * rho.matrix() * u.adjoint()));
            CHECK(entroq::von_neumann_entropy(rotated) ==
                  doctest::Approx(entroq::von_neumann_entropy(rho)).epsilon(1e-9));
        }
    }
}

TEST_CASE("trace_norm") {
    CHECK(entroq::trace_norm(entroq::random_density(4, 4, 5)) == doctest::Approx(1.0));

    ComplexMatrix d(2, 2);
    d << 1, 0, 0, -1;
    CHECK(entroq::trace_norm(d) == doctest::Approx(2.0));

    // orthogonal pure states sit at maximal trace distance
    const ComplexMatrix diff =
        entroq::pure_basis_state(2, 0).matrix() - entroq::pure_basis_state(2, 1).matrix();
    CHECK(entroq::trace_norm(diff) == doctest::Approx(2.0));

    SUBCASE("pairs of states never exceed distance 2") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const ComplexMatrix a = entroq::random_density(4, 4, seed).matrix();
            const ComplexMatrix b = entroq::random_density(4, 2, seed + 1000).matrix();
            CHECK(entroq::trace_norm(ComplexMatrix(a - b)) <= 2.0 + 1e-10);
        }
    }
    SUBCASE("rejects non-Hermitian input") {
        ComplexMatrix m(2, 2);
        m << 0, 2, 0, 0;
        CHECK_THROWS_AS(entroq::trace_norm(m), entroq::NotHermitian);
    }
}

TEST_CASE("hs_norm") {
    CHECK(entroq::hs_norm(ComplexMatrix::Identity(2, 2)) == doctest::Approx(std::sqrt(2.0)));
    CHECK(entroq::hs_norm(ComplexMatrix::Zero(3, 3)) == 0.0);

    const ComplexMatrix half =
        entroq::pure_basis_state(2).matrix() - 0.5 * ComplexMatrix::Identity(2, 2);
    CHECK(entroq::hs_norm(half) == doctest::Approx(0.7071067811865475));

    SUBCASE("squared norm equals tr(X*X)") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const ComplexMatrix x = entroq::random_density(8, 3, seed).matrix();
            const double direct = entroq::hs_norm(x);
            const double via_trace = std::sqrt((x.adjoint() * x).trace().real());
            CHECK(direct * direct == doctest::Approx(via_trace * via_trace).epsilon(1e-10));
        }
    }
}

TEST_CASE("random_density") {
    SUBCASE("rank one is pure") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const DensityMatrix rho = entroq::random_density(2, 1, seed);
            CHECK(entroq::von_neumann_entropy(rho) <= 1e-9);
        }
    }
    SUBCASE("normalized") {
        const DensityMatrix rho = entroq::random_density(4, 4, 7);
        CHECK(std::abs(rho.matrix().trace().real() - 1.0) <= 1e-10);
    }
    SUBCASE("deterministic per seed") {
        const DensityMatrix a = entroq::random_density(6, 3, 99);
        const DensityMatrix b = entroq::random_density(6, 3, 99);
        CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() == 0.0);
        const DensityMatrix c = entroq::random_density(6, 3, 100);
        CHECK((a.matrix() - c.matrix()).cwiseAbs().maxCoeff() > 0.0);
    }
    SUBCASE("rank bounds enforced") {
        CHECK_THROWS_AS(entroq::random_density(4, 0, 1), entroq::BadRank);
        CHECK_THROWS_AS(entroq::random_density(4, 5, 1), entroq::BadRank);
    }
}

TEST_CASE("random_haar_unitary") {
    SUBCASE("scalar case has unit modulus") {
        const ComplexMatrix u = entroq::random_haar_unitary(1, 3);
        CHECK(std::abs(u(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("unitarity and determinism") {
        for (int dim : {2, 4, 8}) {
            const ComplexMatrix u = entroq::random_haar_unitary(dim, 17);
            CHECK(entroq::hs_norm(ComplexMatrix(u.adjoint() * u -
                                                ComplexMatrix::Identity(dim, dim))) <= 1e-10);
            CHECK((u - entroq::random_haar_unitary(dim, 17)).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("conjugation preserves spectra") {
        const DensityMatrix rho = entroq::random_density(4, 4, 23);
        const ComplexMatrix u = entroq::random_haar_unitary(4, 29);
        const auto before = entroq::hermitian_eigendecompose(rho.matrix()).eigenvalues;
        const auto after =
            entroq::hermitian_eigendecompose(ComplexMatrix(u * rho.matrix() * u.adjoint()))
                .eigenvalues;
        for (int i = 0; i < 4; ++i) CHECK(after(i) == doctest::Approx(before(i)).epsilon(1e-9));
    }
}

TEST_CASE("DensityMatrix validation") {
    SUBCASE("rejects non-Hermitian") {
        ComplexMatrix m(2, 2);
        m << 0.5, 0.1, 0.3, 0.5;
        CHECK_THROWS_AS(DensityMatrix{m}, entroq::NotHermitian);
    }
    SUBCASE("rejects wrong trace") {
        ComplexMatrix m = 2.0 * ComplexMatrix::Identity(2, 2);
        CHECK_THROWS_AS(DensityMatrix{m}, entroq::InvariantViolation);
    }
    SUBCASE("rejects negative eigenvalues") {
        ComplexMatrix m(2, 2);
        m << 1.5, 0, 0, -0.5;
        CHECK_THROWS_AS(DensityMatrix{m}, entroq::InvariantViolation);
    }
    SUBCASE("qubit count recorded only at powers of two") {
        CHECK(entroq::maximally_mixed(8).num_qubits() == 3);
        CHECK_FALSE(entroq::maximally_mixed(6).num_qubits().has_value());
        CHECK(entroq::maximally_mixed(1).num_qubits() == 0);
    }
}
