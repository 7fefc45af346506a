#pragma once

#include <vector>

#include "entroq/channels.hpp"
#include "entroq/functionals.hpp"
#include "entroq/linalg.hpp"

namespace entroq {

struct Gate {
    std::vector<int> targets;  // 1 or 2 distinct qubit indices, 0 = leftmost factor
    ComplexMatrix matrix;      // unitary of dimension 2^(target count)
};

struct GateLayer {
    std::vector<Gate> gates;  // pairwise-disjoint target sets
};

// Throws BadLayer naming the offending layer/gate. gate_bound caps the number
// of gates per layer; layer_index >= 0 is echoed in error messages.
void validate_layer(const GateLayer& layer, int n, int gate_bound, int layer_index = -1);

class Circuit {
  public:
    // gate_bound 0 means "one gate per qubit", the widest possible layer.
    Circuit(int num_qubits, std::vector<GateLayer> layers, int gate_bound = 0);
    int num_qubits() const { return num_qubits_; }
    int gate_bound() const { return gate_bound_; }
    const std::vector<GateLayer>& layers() const { return layers_; }

  private:
    int num_qubits_;
    int gate_bound_;
    std::vector<GateLayer> layers_;
};

// U rho U* for the layer's tensor-product unitary; entropy-preserving.
DensityMatrix apply_gate_layer(const DensityMatrix& rho, const GateLayer& layer, int n);

// One computation step followed by one noise step.
DensityMatrix step(const DensityMatrix& rho, const GateLayer& layer,
                   const LocalStochasticNoise& noise);

struct RunRow {
    int m = 0;
    double entropy = 0.0;
    double delta_s = 0.0;
    double gain_bound = 0.0;  // closed-form certified entropy gain at this step count
    double delta_f = 0.0;
    bool crashed = false;
};

struct RunLedger {
    double beta = 0.0;
    double energy_budget = 0.0;
    double epsilon = 0.0;
    double c_used = 0.0;
    double gain_coefficient = 0.0;  // of the initial state
    int num_qubits = 0;
    std::vector<RunRow> rows;
};

struct RunOptions {
    bool stop_on_crash = false;  // default: flag the crash row and keep going
};

RunLedger run(const Circuit& circuit, const LocalStochasticNoise& noise, const DensityMatrix& rho0,
              const FreeEnergyParams& params, double c_used, const RunOptions& options = {});

}  // namespace entroq
