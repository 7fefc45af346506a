#include "entroq/spatial.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "entroq/errors.hpp"

namespace entroq {

namespace {

constexpr double kCommutatorTol = 1e-9;
constexpr double kOverlapSlack = 1e-9;
constexpr double kBoundSlack = 1e-9;
constexpr int kMaxAssembledQubits = 12;  // global matrices capped at 4096 x 4096

double frobenius_overlap(const ComplexMatrix& a, const ComplexMatrix& b) {
    // tr(ab) for Hermitian a, b.
    return a.cwiseProduct(b.conjugate()).sum().real();
}

ComplexMatrix uniform_mixture(const std::vector<DensityMatrix>& members) {
    ComplexMatrix acc = members.front().matrix();
    for (std::size_t i = 1; i < members.size(); ++i) acc += members[i].matrix();
    return acc / static_cast<double>(members.size());
}

}  // namespace

ClusterLayout::ClusterLayout(int n_in, int k_in, int d_in) : n(n_in), k(k_in), d(d_in) {
    if (n < 1 || k < 1 || d < 1)
        throw InvariantViolation("layout sizes (blocks, clusters per block, qubits per cluster) must be >= 1");
}

ProductState::ProductState(ClusterLayout layout, std::vector<DensityMatrix> cluster_states)
    : layout_(layout), cluster_states_(std::move(cluster_states)) {
    if (static_cast<int>(cluster_states_.size()) != layout_.clusters())
        throw DimMismatch("expected " + std::to_string(layout_.clusters()) + " cluster states, got " +
                          std::to_string(cluster_states_.size()));
    const Eigen::Index cluster_dim = Eigen::Index{1} << layout_.d;
    for (const auto& rho : cluster_states_) {
        if (rho.dim() != cluster_dim)
            throw DimMismatch("cluster states must have dimension 2^" + std::to_string(layout_.d));
    }
}

DensityMatrix ProductState::assemble() const {
    if (layout_.qubits() > kMaxAssembledQubits)
        throw SizeLimit("assembled state would have " + std::to_string(layout_.qubits()) +
                        " qubits; the exact-check cap is " + std::to_string(kMaxAssembledQubits));
    ComplexMatrix acc = ComplexMatrix::Identity(1, 1);
    for (const auto& rho : cluster_states_) acc = tensor_product(acc, rho.matrix());
    return DensityMatrix(std::move(acc));
}

CommutingFamily::CommutingFamily(std::vector<DensityMatrix> members, double kappa)
    : members_(std::move(members)), kappa_(kappa) {
    if (members_.empty()) throw InvariantViolation("family needs at least one member");
    if (!(kappa_ >= 0.0)) throw InvariantViolation("overlap budget must be nonnegative");
    const Eigen::Index dim = members_.front().dim();
    for (const auto& m : members_)
        if (m.dim() != dim) throw DimMismatch("family members must share one dimension");
    const int n = static_cast<int>(members_.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const ComplexMatrix& a = members_[i].matrix();
            const ComplexMatrix& b = members_[j].matrix();
            const double defect = hs_norm(a * b - b * a);
            if (defect > kCommutatorTol)
                throw InvariantViolation("members " + std::to_string(i) + " and " + std::to_string(j) +
                                         " do not commute (defect " + std::to_string(defect) + ")");
        }
    }
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) sum += frobenius_overlap(members_[j].matrix(), members_[i].matrix());
        if (sum > kappa_ + kOverlapSlack)
            throw InvariantViolation("overlap sum " + std::to_string(sum) + " at member " +
                                     std::to_string(i) + " exceeds the budget " +
                                     std::to_string(kappa_));
    }
}

ProductState BlockDepolarizer::operator()(const ProductState& state) const {
    const ClusterLayout& l = state.layout();
    if (l.n != layout.n || l.k != layout.k || l.d != layout.d)
        throw DimMismatch("state layout does not match the depolarizer's layout");
    const Eigen::Index cluster_dim = Eigen::Index{1} << layout.d;
    const ComplexMatrix mixed =
        ComplexMatrix::Identity(cluster_dim, cluster_dim) / static_cast<double>(cluster_dim);
    std::vector<DensityMatrix> out;
    out.reserve(state.cluster_states().size());
    const int first = block * layout.k;
    const int last = first + layout.k;  // exclusive
    for (int l_idx = 0; l_idx < static_cast<int>(state.cluster_states().size()); ++l_idx) {
        const DensityMatrix& rho = state.cluster_states()[l_idx];
        if (l_idx >= first && l_idx < last) {
            out.emplace_back((1.0 - lambda) * rho.matrix() + lambda * mixed);
        } else {
            out.push_back(rho);
        }
    }
    return ProductState(layout, std::move(out));
}

BlockDepolarizer block_depolarizer(const ClusterLayout& layout, int block, double lambda) {
    if (block < 0 || block >= layout.n)
        throw BadBlockIndex("block " + std::to_string(block) + " out of range for " +
                            std::to_string(layout.n) + " blocks");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw BadLambda("block depolarizing strength must lie in [0,1]");
    return BlockDepolarizer{layout, block, lambda};
}

CommutingFamily build_family(const ProductState& state, double lambda) {
    const int n = state.layout().n;
    std::vector<DensityMatrix> members;
    members.reserve(n);
    for (int i = 0; i < n; ++i)
        members.push_back(block_depolarizer(state.layout(), i, lambda)(state).assemble());
    double kappa = 0.0;
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) sum += frobenius_overlap(members[j].matrix(), members[i].matrix());
        kappa = std::max(kappa, sum);
    }
    return CommutingFamily(std::move(members), kappa);
}

double overlap_sum(const CommutingFamily& family, int i) {
    if (i < 0 || i >= family.size())
        throw BadIndex("member " + std::to_string(i) + " out of range for family of " +
                       std::to_string(family.size()));
    double sum = 0.0;
    for (int j = 0; j < family.size(); ++j)
        if (j != i)
            sum += frobenius_overlap(family.members()[j].matrix(), family.members()[i].matrix());
    return sum;
}

double overlap_bound(int n, int k, int d, double lambda) {
    if (n < 1 || k < 1 || d < 1) throw InvariantViolation("layout sizes must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw BadLambda("lambda must lie in [0,1]");
    const double base = 1.0 - lambda * (1.0 - std::ldexp(1.0, -d));
    return (n - 1) * std::pow(base, 2.0 * k);
}

int min_block_size(int n, int d, double lambda) {
    if (n < 1 || d < 1) throw InvariantViolation("layout sizes must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw BadLambda("lambda must lie in [0,1]");
    if (n <= 2) return 1;
    if (lambda == 0.0)
        throw Unreachable("identity block noise cannot pull the overlap envelope below 1 for " +
                          std::to_string(n) + " blocks");
    const double base = 1.0 - lambda * (1.0 - std::ldexp(1.0, -d));
    int k = static_cast<int>(std::ceil(std::log(n - 1.0) / (2.0 * std::log(1.0 / base))));
    if (k < 1) k = 1;
    while (overlap_bound(n, k, d, lambda) > 1.0) ++k;
    while (k > 1 && overlap_bound(n, k - 1, d, lambda) <= 1.0) --k;
    return k;
}

MixtureEntropyReport mixture_entropy_bound(const CommutingFamily& family) {
    const int n = family.size();
    const double lhs = von_neumann_entropy(DensityMatrix(uniform_mixture(family.members())));
    double avg = 0.0;
    for (const auto& m : family.members()) avg += von_neumann_entropy(m);
    avg /= n;
    const double rhs = avg + std::log(static_cast<double>(n)) - 2.0 * std::sqrt(family.kappa());
    const double slack = lhs - rhs;
    if (slack < -kBoundSlack)
        throw InvariantViolation("mixture entropy fell below the certified bound (slack " +
                                 std::to_string(slack) + ")");
    return MixtureEntropyReport{lhs, rhs, slack};
}

MixtureGainReport mixture_entropy_gain(const ProductState& state, double lambda) {
    const CommutingFamily family = build_family(state, lambda);
    const double s0 = von_neumann_entropy(state.assemble());
    const int n = family.size();
    const double mixture_entropy = von_neumann_entropy(DensityMatrix(uniform_mixture(family.members())));
    double avg = 0.0;
    for (const auto& m : family.members()) avg += von_neumann_entropy(m);
    avg /= n;
    const double gain = mixture_entropy - s0;
    const double lower =
        avg - s0 + std::log(static_cast<double>(n)) - 2.0 * std::sqrt(family.kappa());
    if (gain < lower - kBoundSlack)
        throw InvariantViolation("mixture entropy gain fell below the certified bound");
    return MixtureGainReport{gain, lower};
}

QubitBudget max_qubit_count(const FreeEnergyParams& params, double kappa) {
    if (!(kappa >= 0.0)) throw InvariantViolation("overlap budget must be nonnegative");
    const double x = params.beta * params.energy_budget + 2.0 * std::sqrt(kappa);
    if (x >= std::log(4.0e18))
        return QubitBudget{std::numeric_limits<std::uint64_t>::max(), kappa};
    std::uint64_t n = static_cast<std::uint64_t>(std::floor(std::exp(x))) + 1;
    while (std::log(static_cast<double>(n)) <= x) ++n;
    while (n >= 2 && std::log(static_cast<double>(n - 1)) > x) --n;
    return QubitBudget{n, kappa};
}

std::uint64_t QubitBudget::qubits(int k, int d) const {
    if (k < 1 || d < 1) throw InvariantViolation("layout sizes must be >= 1");
    const std::uint64_t per_block = static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(d);
    if (n_crash > std::numeric_limits<std::uint64_t>::max() / per_block)
        return std::numeric_limits<std::uint64_t>::max();
    return n_crash * per_block;
}

}  // namespace entroq
