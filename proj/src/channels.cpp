#include "entroq/channels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace entroq {

namespace {

const Eigen::Matrix2cd kPauliX = (Eigen::Matrix2cd() << Complex(0, 0), Complex(1, 0),
                                  Complex(1, 0), Complex(0, 0))
                                     .finished();
const Eigen::Matrix2cd kPauliY = (Eigen::Matrix2cd() << Complex(0, 0), Complex(0, -1),
                                  Complex(0, 1), Complex(0, 0))
                                     .finished();
const Eigen::Matrix2cd kPauliZ = (Eigen::Matrix2cd() << Complex(1, 0), Complex(0, 0),
                                  Complex(0, 0), Complex(-1, 0))
                                     .finished();

ComplexMatrix rehermitize(const ComplexMatrix& x) {
    return 0.5 * (x + x.adjoint().eval());
}

// Closed-form trace norm of a 2x2 Hermitian matrix.
double hermitian2_trace_norm(const ComplexMatrix& m) {
    const double a = m(0, 0).real();
    const double c = m(1, 1).real();
    const double disc = std::hypot(a - c, 2.0 * std::abs(m(0, 1)));
    const double lo = 0.5 * ((a + c) - disc);
    const double hi = 0.5 * ((a + c) + disc);
    return std::abs(lo) + std::abs(hi);
}

ComplexMatrix product_channel_raw(const QuantumChannel& r, int n, ComplexMatrix x) {
    for (int q = 0; q < n; ++q) x = detail::apply_channel_on_qubit(r, x, n, q);
    return x;
}

}  // namespace

QuantumChannel QuantumChannel::depolarizing(double lambda, int dim) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw BadLambda("depolarizing strength must lie in [0,1), got " + std::to_string(lambda));
    if (dim < 1) throw DimMismatch("channel dimension must be >= 1");
    QuantumChannel t(Form::Depolarizing, dim);
    t.lambda_ = lambda;
    return t;
}

QuantumChannel QuantumChannel::kraus(std::vector<ComplexMatrix> ops) {
    if (ops.empty()) throw InvariantViolation("Kraus channel needs at least one operator");
    const Eigen::Index d = ops.front().rows();
    for (const auto& k : ops) {
        if (k.rows() != d || k.cols() != d)
            throw DimMismatch("Kraus operators must be square matrices of equal dimension");
    }
    ComplexMatrix completeness = ComplexMatrix::Zero(d, d);
    for (const auto& k : ops) completeness += k.adjoint() * k;
    completeness -= ComplexMatrix::Identity(d, d);
    if (completeness.cwiseAbs().maxCoeff() > kHermitianTol)
        throw InvariantViolation("Kraus operators are not trace preserving within 1e-10");
    QuantumChannel t(Form::Kraus, static_cast<int>(d));
    t.kraus_ = std::move(ops);
    return t;
}

QuantumChannel QuantumChannel::unitary(const ComplexMatrix& u) {
    return kraus({u});
}

ComplexMatrix QuantumChannel::apply_raw(const ComplexMatrix& x) const {
    if (form_ == Form::Depolarizing) {
        return (1.0 - lambda_) * x +
               (lambda_ * x.trace() / static_cast<double>(dim_)) *
                   ComplexMatrix::Identity(dim_, dim_);
    }
    ComplexMatrix out = ComplexMatrix::Zero(dim_, dim_);
    for (const auto& k : kraus_) out += k * x * k.adjoint();
    return out;
}

LocalStochasticNoise::LocalStochasticNoise(double eps, QuantumChannel local, int n)
    : epsilon(eps), local_channel(std::move(local)), num_qubits(n) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw InvariantViolation("noise strength must lie in [0,1]");
    if (local_channel.dim() != 2)
        throw DimMismatch("local noise channel must act on a single qubit");
    if (num_qubits < 1) throw InvariantViolation("qubit count must be >= 1");
}

DensityMatrix apply_channel(const QuantumChannel& t, const DensityMatrix& rho) {
    if (t.dim() != rho.dim())
        throw DimMismatch("channel dim " + std::to_string(t.dim()) + " vs state dim " +
                          std::to_string(rho.dim()));
    return DensityMatrix(rehermitize(t.apply_raw(rho.matrix())));
}

bool is_bistochastic(const QuantumChannel& t, double tol) {
    const ComplexMatrix mixed = ComplexMatrix::Identity(t.dim(), t.dim()) / static_cast<double>(t.dim());
    return hs_norm(t.apply_raw(mixed) - mixed) <= tol;
}

ContractionEstimate contraction_rate(const QuantumChannel& r, int grid_resolution) {
    if (r.dim() != 2) throw DimMismatch("contraction_rate requires a qubit channel");
    if (grid_resolution < 1) throw Error("grid resolution must be >= 1");

    // For an antipodal pure pair along Bloch direction n, rho - sigma is the
    // Pauli vector n.sigma with trace norm exactly 2, and channel differences
    // only see that difference, so the ratio is a function of the direction.
    const auto ratio_at = [&r](double theta, double phi) {
        const double nx = std::sin(theta) * std::cos(phi);
        const double ny = std::sin(theta) * std::sin(phi);
        const double nz = std::cos(theta);
        ComplexMatrix delta(2, 2);
        delta << Complex(nz, 0), Complex(nx, -ny), Complex(nx, ny), Complex(-nz, 0);
        return hermitian2_trace_norm(r.apply_raw(delta)) / 2.0;
    };

    const int g = grid_resolution;
    const double pi = std::acos(-1.0);
    double best = -1.0;
    double best_theta = 0.0;
    double best_phi = 0.0;
    for (int i = 0; i < g; ++i) {
        const double theta = pi * (i + 0.5) / g;
        for (int j = 0; j < g; ++j) {
            const double phi = 2.0 * pi * j / g;
            const double v = ratio_at(theta, phi);
            if (v > best) {  // strict: ties keep the lowest grid index
                best = v;
                best_theta = theta;
                best_phi = phi;
            }
        }
    }

    const double grid_best = best;
    double step = pi / g;
    for (int iter = 0; iter < 500 && step > 1e-12; ++iter) {
        const double cand[4][2] = {{best_theta - step, best_phi},
                                   {best_theta + step, best_phi},
                                   {best_theta, best_phi - step},
                                   {best_theta, best_phi + step}};
        int take = -1;
        double take_val = best;
        for (int c = 0; c < 4; ++c) {
            const double v = ratio_at(cand[c][0], cand[c][1]);
            if (v > take_val) {
                take_val = v;
                take = c;
            }
        }
        if (take < 0) {
            step *= 0.5;
            continue;
        }
        const double improvement = take_val - best;
        best = take_val;
        best_theta = cand[take][0];
        best_phi = cand[take][1];
        if (improvement < 1e-9) break;
    }

    const auto bloch_state = [](double theta, double phi, double sign) {
        const double nx = sign * std::sin(theta) * std::cos(phi);
        const double ny = sign * std::sin(theta) * std::sin(phi);
        const double nz = sign * std::cos(theta);
        ComplexMatrix m(2, 2);
        m << Complex(0.5 * (1 + nz), 0), Complex(0.5 * nx, -0.5 * ny),
            Complex(0.5 * nx, 0.5 * ny), Complex(0.5 * (1 - nz), 0);
        return DensityMatrix(std::move(m));
    };

    return ContractionEstimate{std::clamp(best, 0.0, 1.0),
                               bloch_state(best_theta, best_phi, 1.0),
                               bloch_state(best_theta, best_phi, -1.0),
                               grid_resolution,
                               best > grid_best};
}

DensityMatrix apply_product_channel(const QuantumChannel& r, int n, const DensityMatrix& rho) {
    if (r.dim() != 2) throw DimMismatch("product channel needs a qubit local channel");
    if (n < 1 || rho.dim() != (Eigen::Index{1} << n))
        throw DimMismatch("state dimension must be 2^n");
    return DensityMatrix(rehermitize(product_channel_raw(r, n, rho.matrix())));
}

DensityMatrix noise_step(const LocalStochasticNoise& noise, const DensityMatrix& rho) {
    if (rho.dim() != (Eigen::Index{1} << noise.num_qubits))
        throw DimMismatch("state dimension must be 2^num_qubits");
    const ComplexMatrix mixed =
        product_channel_raw(noise.local_channel, noise.num_qubits, rho.matrix());
    return DensityMatrix(
        rehermitize((1.0 - noise.epsilon) * rho.matrix() + noise.epsilon * mixed));
}

DensityMatrix noise_step_power(const LocalStochasticNoise& noise, const DensityMatrix& rho, int m) {
    if (m < 0) throw Error("step count must be nonnegative");
    DensityMatrix out = rho;
    for (int i = 0; i < m; ++i) out = noise_step(noise, out);
    return out;
}

namespace detail {

ComplexMatrix conjugate_on_qubit(const ComplexMatrix& rho, int n, int q, const Eigen::Matrix2cd& k) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    const Eigen::Index mask = Eigen::Index{1} << (n - 1 - q);  // qubit 0 = leftmost factor
    ComplexMatrix y(dim, dim);
    for (Eigen::Index r0 = 0; r0 < dim; ++r0) {
        if (r0 & mask) continue;
        const Eigen::Index r1 = r0 | mask;
        y.row(r0) = k(0, 0) * rho.row(r0) + k(0, 1) * rho.row(r1);
        y.row(r1) = k(1, 0) * rho.row(r0) + k(1, 1) * rho.row(r1);
    }
    ComplexMatrix z(dim, dim);
    for (Eigen::Index c0 = 0; c0 < dim; ++c0) {
        if (c0 & mask) continue;
        const Eigen::Index c1 = c0 | mask;
        z.col(c0) = std::conj(k(0, 0)) * y.col(c0) + std::conj(k(0, 1)) * y.col(c1);
        z.col(c1) = std::conj(k(1, 0)) * y.col(c0) + std::conj(k(1, 1)) * y.col(c1);
    }
    return z;
}

ComplexMatrix apply_channel_on_qubit(const QuantumChannel& r, const ComplexMatrix& rho, int n, int q) {
    if (r.form() == QuantumChannel::Form::Kraus) {
        const Eigen::Index dim = rho.rows();
        ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
        for (const auto& k : r.kraus_ops())
            out += conjugate_on_qubit(rho, n, q, Eigen::Matrix2cd(k));
        return out;
    }
    // Depolarizing on one qubit of a register: the uniform replacement of that
    // qubit equals the average of the four Pauli conjugations, so
    //   D_q(rho) = (1 - 3 lambda/4) rho + (lambda/4)(X rho X + Y rho Y + Z rho Z)|_q.
    const double lambda = r.lambda();
    ComplexMatrix out = (1.0 - 0.75 * lambda) * rho;
    out += 0.25 * lambda * conjugate_on_qubit(rho, n, q, kPauliX);
    out += 0.25 * lambda * conjugate_on_qubit(rho, n, q, kPauliY);
    out += 0.25 * lambda * conjugate_on_qubit(rho, n, q, kPauliZ);
    return out;
}

}  // namespace detail

}  // namespace entroq
