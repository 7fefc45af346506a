#include "entroq/simulator.hpp"

#include <string>
#include <utility>

#include "entroq/errors.hpp"

namespace entroq {

namespace {

constexpr int kMaxQubits = 12;

std::string gate_context(int layer_index, int gate_index) {
    std::string ctx;
    if (layer_index >= 0) ctx += "layer " + std::to_string(layer_index) + ", ";
    ctx += "gate " + std::to_string(gate_index) + ": ";
    return ctx;
}

// U rho U* where u acts on the ordered qubit pair (q1, q2): basis index of the
// gate factor is 2*bit(q1) + bit(q2).
ComplexMatrix conjugate_on_qubit_pair(const ComplexMatrix& rho, int n, int q1, int q2,
                                      const ComplexMatrix& u) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    const Eigen::Index m1 = Eigen::Index{1} << (n - 1 - q1);
    const Eigen::Index m2 = Eigen::Index{1} << (n - 1 - q2);
    ComplexMatrix y(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        if (r & (m1 | m2)) continue;
        const Eigen::Index idx[4] = {r, r | m2, r | m1, r | m1 | m2};
        for (int a = 0; a < 4; ++a)
            y.row(idx[a]) = u(a, 0) * rho.row(idx[0]) + u(a, 1) * rho.row(idx[1]) +
                            u(a, 2) * rho.row(idx[2]) + u(a, 3) * rho.row(idx[3]);
    }
    ComplexMatrix z(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        if (c & (m1 | m2)) continue;
        const Eigen::Index idx[4] = {c, c | m2, c | m1, c | m1 | m2};
        for (int a = 0; a < 4; ++a)
            z.col(idx[a]) = std::conj(u(a, 0)) * y.col(idx[0]) + std::conj(u(a, 1)) * y.col(idx[1]) +
                            std::conj(u(a, 2)) * y.col(idx[2]) + std::conj(u(a, 3)) * y.col(idx[3]);
    }
    return z;
}

}  // namespace

void validate_layer(const GateLayer& layer, int n, int gate_bound, int layer_index) {
    std::string layer_ctx =
        layer_index >= 0 ? "layer " + std::to_string(layer_index) + ": " : std::string{};
    if (static_cast<int>(layer.gates.size()) > gate_bound)
        throw BadLayer(layer_ctx + std::to_string(layer.gates.size()) +
                       " gates exceed the per-layer bound " + std::to_string(gate_bound));
    std::vector<bool> used(n, false);
    for (int g = 0; g < static_cast<int>(layer.gates.size()); ++g) {
        const Gate& gate = layer.gates[g];
        const std::string ctx = gate_context(layer_index, g);
        const int arity = static_cast<int>(gate.targets.size());
        if (arity < 1 || arity > 2)
            throw BadLayer(ctx + "gates act on 1 or 2 qubits, got " + std::to_string(arity));
        for (int t : gate.targets) {
            if (t < 0 || t >= n)
                throw BadLayer(ctx + "target " + std::to_string(t) + " out of range for " +
                               std::to_string(n) + " qubits");
            if (used[t])
                throw BadLayer(ctx + "target " + std::to_string(t) + " already used in this layer");
            used[t] = true;
        }
        if (arity == 2 && gate.targets[0] == gate.targets[1])
            throw BadLayer(ctx + "two-qubit gate targets must be distinct");
        const Eigen::Index want = Eigen::Index{1} << arity;
        if (gate.matrix.rows() != want || gate.matrix.cols() != want)
            throw BadLayer(ctx + "matrix must be " + std::to_string(want) + "x" +
                           std::to_string(want) + " for " + std::to_string(arity) + " target(s)");
        const ComplexMatrix defect =
            gate.matrix.adjoint() * gate.matrix - ComplexMatrix::Identity(want, want);
        if (defect.cwiseAbs().maxCoeff() > kHermitianTol)
            throw BadLayer(ctx + "matrix is not unitary within 1e-10");
    }
}

Circuit::Circuit(int num_qubits, std::vector<GateLayer> layers, int gate_bound)
    : num_qubits_(num_qubits), gate_bound_(gate_bound == 0 ? num_qubits : gate_bound),
      layers_(std::move(layers)) {
    if (num_qubits_ < 1) throw InvariantViolation("circuit needs at least one qubit");
    if (num_qubits_ > kMaxQubits)
        throw SizeLimit("circuits are capped at " + std::to_string(kMaxQubits) + " qubits");
    if (gate_bound_ < 1) throw InvariantViolation("per-layer gate bound must be >= 1");
    for (int i = 0; i < static_cast<int>(layers_.size()); ++i)
        validate_layer(layers_[i], num_qubits_, gate_bound_, i);
}

DensityMatrix apply_gate_layer(const DensityMatrix& rho, const GateLayer& layer, int n) {
    if (n < 1 || rho.dim() != (Eigen::Index{1} << n))
        throw DimMismatch("state dimension must be 2^n");
    validate_layer(layer, n, n);
    ComplexMatrix x = rho.matrix();
    for (const Gate& gate : layer.gates) {
        if (gate.targets.size() == 1) {
            x = detail::conjugate_on_qubit(x, n, gate.targets[0], Eigen::Matrix2cd(gate.matrix));
        } else {
            x = conjugate_on_qubit_pair(x, n, gate.targets[0], gate.targets[1], gate.matrix);
        }
    }
    return DensityMatrix(0.5 * (x + x.adjoint().eval()));
}

DensityMatrix step(const DensityMatrix& rho, const GateLayer& layer,
                   const LocalStochasticNoise& noise) {
    return noise_step(noise, apply_gate_layer(rho, layer, noise.num_qubits));
}

RunLedger run(const Circuit& circuit, const LocalStochasticNoise& noise, const DensityMatrix& rho0,
              const FreeEnergyParams& params, double c_used, const RunOptions& options) {
    if (circuit.num_qubits() != noise.num_qubits)
        throw DimMismatch("noise and circuit disagree on the qubit count");
    if (rho0.dim() != (Eigen::Index{1} << circuit.num_qubits()))
        throw DimMismatch("initial state dimension must be 2^num_qubits");
    if (!(c_used >= 0.0 && c_used <= 1.0))
        throw InvariantViolation("contraction rate must lie in [0,1]");

    RunLedger ledger;
    ledger.beta = params.beta;
    ledger.energy_budget = params.energy_budget;
    ledger.epsilon = noise.epsilon;
    ledger.c_used = c_used;
    ledger.num_qubits = circuit.num_qubits();
    ledger.gain_coefficient = entropy_gain_coefficient(rho0, circuit.num_qubits());

    const double s0 = von_neumann_entropy(rho0);
    DensityMatrix state = rho0;
    RunRow first{0, s0, 0.0, 0.0, free_energy_shift(params, 0.0), false};
    first.crashed = first.delta_f < 0.0;
    ledger.rows.push_back(first);
    if (first.crashed && options.stop_on_crash) return ledger;

    for (int m = 1; m <= static_cast<int>(circuit.layers().size()); ++m) {
        state = step(state, circuit.layers()[m - 1], noise);
        RunRow row;
        row.m = m;
        row.entropy = von_neumann_entropy(state);
        row.delta_s = row.entropy - s0;
        row.gain_bound =
            closed_form_gain_bound(ledger.gain_coefficient, noise.epsilon, c_used, m);
        row.delta_f = free_energy_shift(params, row.delta_s);
        row.crashed = row.delta_f < 0.0;
        ledger.rows.push_back(row);
        if (row.crashed && options.stop_on_crash) break;
    }
    return ledger;
}

}  // namespace entroq
