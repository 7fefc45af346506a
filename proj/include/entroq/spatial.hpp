#pragma once

#include <cstdint>
#include <vector>

#include "entroq/functionals.hpp"
#include "entroq/linalg.hpp"

namespace entroq {

// Register of n blocks, each holding k clusters of d qubits.
struct ClusterLayout {
    int n;
    int k;
    int d;
    ClusterLayout(int n_in, int k_in, int d_in);
    int clusters() const { return n * k; }
    int qubits() const { return n * k * d; }
};

// Tensor-product state over the clusters, kept in factored form; the global
// matrix is only materialized by assemble(), capped at dimension 4096.
class ProductState {
  public:
    ProductState(ClusterLayout layout, std::vector<DensityMatrix> cluster_states);
    const ClusterLayout& layout() const { return layout_; }
    const std::vector<DensityMatrix>& cluster_states() const { return cluster_states_; }
    DensityMatrix assemble() const;

  private:
    ClusterLayout layout_;
    std::vector<DensityMatrix> cluster_states_;
};

// Equal-dimension density matrices that pairwise commute, with an overlap
// budget kappa: for every i, sum_{j != i} tr(rho_j rho_i) <= kappa.
// Both properties are enforced at construction.
class CommutingFamily {
  public:
    CommutingFamily(std::vector<DensityMatrix> members, double kappa);
    const std::vector<DensityMatrix>& members() const { return members_; }
    double kappa() const { return kappa_; }
    int size() const { return static_cast<int>(members_.size()); }

  private:
    std::vector<DensityMatrix> members_;
    double kappa_;
};

// Depolarizes every cluster of one block and leaves the rest intact.
struct BlockDepolarizer {
    ClusterLayout layout;
    int block;  // 0-based
    double lambda;
    ProductState operator()(const ProductState& state) const;
};

struct MixtureEntropyReport {
    double lhs;    // entropy of the uniform mixture, nats
    double rhs;    // average member entropy + ln n - 2 sqrt(kappa), nats
    double slack;  // lhs - rhs
};

struct MixtureGainReport {
    double gain_exact;       // S(mixture) - S(rho), nats
    double certified_lower;  // the commuting-family lower bound, nats
};

// Conservative crash threshold for the block count: smallest n whose mixing
// entropy ln n - 2 sqrt(kappa) exceeds beta * E. The nonnegative average
// member-entropy term is dropped, so the estimate errs low.
struct QubitBudget {
    std::uint64_t n_crash;
    double kappa;
    std::uint64_t qubits(int k, int d) const;  // n_crash * k * d
};

BlockDepolarizer block_depolarizer(const ClusterLayout& layout, int block, double lambda);

// Members are the n block-depolarized copies of the assembled state; kappa is
// the measured maximum overlap sum.
CommutingFamily build_family(const ProductState& state, double lambda);

double overlap_sum(const CommutingFamily& family, int i);

// Analytic overlap envelope for pure-cluster product states:
// (n-1) * (1 - lambda + lambda/2^d)^(2k).
double overlap_bound(int n, int k, int d, double lambda);

// Smallest k with overlap_bound(n, k, d, lambda) <= 1.
int min_block_size(int n, int d, double lambda);

// Entropy of the uniform mixture against the commuting-family lower bound.
MixtureEntropyReport mixture_entropy_bound(const CommutingFamily& family);

MixtureGainReport mixture_entropy_gain(const ProductState& state, double lambda);

QubitBudget max_qubit_count(const FreeEnergyParams& params, double kappa);

}  // namespace entroq
