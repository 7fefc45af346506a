#pragma once

#include <vector>

#include "entroq/linalg.hpp"

namespace entroq {

/// Trace-preserving completely positive map, stored either as a Kraus
/// operator list or in affine depolarizing form (the latter keeps unitality
/// exact and applies in O(dim^2)).
class QuantumChannel {
  public:
    enum class Form { Depolarizing, Kraus };

    /// sigma -> (1-lambda) sigma + lambda I/dim. Throws BadLambda outside [0,1).
    static QuantumChannel depolarizing(double lambda, int dim = 2);

    /// Kraus form; validates sum K_i* K_i = I within 1e-10.
    static QuantumChannel kraus(std::vector<ComplexMatrix> ops);

    /// Unitary conjugation as a single-element Kraus channel.
    static QuantumChannel unitary(const ComplexMatrix& u);

    Form form() const { return form_; }
    int dim() const { return dim_; }
    bool is_depolarizing() const { return form_ == Form::Depolarizing; }

    /// Depolarizing strength; only meaningful for Form::Depolarizing.
    double lambda() const { return lambda_; }
    const std::vector<ComplexMatrix>& kraus_ops() const { return kraus_; }

    /// Linear action on an arbitrary matrix, no state validation. The
    /// depolarizing form extends linearly as x -> (1-lambda) x + lambda tr(x) I/dim.
    ComplexMatrix apply_raw(const ComplexMatrix& x) const;

  private:
    QuantumChannel(Form form, int dim) : form_(form), dim_(dim) {}

    Form form_;
    int dim_;
    double lambda_ = 0.0;
    std::vector<ComplexMatrix> kraus_;
};

/// Composite noise step (1-epsilon) id + epsilon R^(tensor N) acting on N
/// qubits, with a 2x2 local channel R.
struct LocalStochasticNoise {
    LocalStochasticNoise(double epsilon, QuantumChannel local_channel, int num_qubits);

    double epsilon;
    QuantumChannel local_channel;
    int num_qubits;
};

/// Numerical estimate of a qubit channel's trace-norm contraction rate,
/// together with the state pair realizing it.
struct ContractionEstimate {
    double rate = 0.0;
    DensityMatrix witness_rho;
    DensityMatrix witness_sigma;
    int grid_resolution = 0;
    bool refined = false;

    /// False when the estimated rate is within 1e-6 of 1, i.e. the channel is
    /// not strictly contractive as far as the search can tell.
    bool strictly_contractive() const { return rate < 1.0 - 1e-6; }
};

/// Apply t to rho; the output is re-Hermitized and revalidated.
DensityMatrix apply_channel(const QuantumChannel& t, const DensityMatrix& rho);

/// True iff t maps the maximally mixed state to itself within tol (HS norm).
bool is_bistochastic(const QuantumChannel& t, double tol = 1e-10);

/// Estimate sup over state pairs of ||R(rho)-R(sigma)||_1 / ||rho-sigma||_1
/// for a qubit channel by scanning antipodal pure pairs on a grid_resolution^2
/// Bloch-sphere grid, then refining the best cell by coordinate descent on the
/// spherical angles until the improvement drops below 1e-9. Ties during the
/// scan keep the lowest grid index, so the result does not depend on
/// evaluation order.
ContractionEstimate contraction_rate(const QuantumChannel& r, int grid_resolution);

/// R applied to every qubit factor of an n-qubit state (equivalent to the
/// n-fold tensor power of R). Kraus operators are embedded qubit by qubit, so
/// memory stays O(dim^2).
DensityMatrix apply_product_channel(const QuantumChannel& r, int n, const DensityMatrix& rho);

/// One noise step: (1-epsilon) rho + epsilon R^(tensor N)(rho).
DensityMatrix noise_step(const LocalStochasticNoise& noise, const DensityMatrix& rho);

/// m-fold iteration of noise_step.
DensityMatrix noise_step_power(const LocalStochasticNoise& noise, const DensityMatrix& rho, int m);

namespace detail {

/// K_q rho K_q^dagger with the 2x2 operator k embedded on qubit q of an
/// n-qubit system; qubit 0 is the most significant bit / leftmost factor.
ComplexMatrix conjugate_on_qubit(const ComplexMatrix& rho, int n, int q, const Eigen::Matrix2cd& k);

/// Single-qubit channel applied to qubit q of an n-qubit matrix (linear, no
/// validation).
ComplexMatrix apply_channel_on_qubit(const QuantumChannel& r, const ComplexMatrix& rho, int n, int q);

}  // namespace detail

}  // namespace entroq
