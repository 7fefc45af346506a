#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "entroq/channels.hpp"
#include "entroq/linalg.hpp"

namespace entroq {

struct FreeEnergyParams {
    double beta;           // inverse temperature, 1/energy units
    double energy_budget;  // available work budget, energy units
    FreeEnergyParams(double beta_in, double energy_budget_in);
};

// Outcome of the crash-time estimators. `never` marks degenerate noise that
// certifies no entropy production; `bound_saturates` marks a budget at or above
// the gain bound's ceiling, where the closed-form bound cannot certify a crash.
struct CrashTimeResult {
    bool never = false;
    bool bound_saturates = false;
    std::uint64_t m_linearized = 0;
    std::optional<std::uint64_t> m_exact;
};

struct TemporalBoundReport {
    int m = 0;
    std::optional<double> entropy_gain_exact;  // absent above the exact-simulation cutoff
    double contraction_bound = 0.0;
    double binomial_bound = 0.0;
    double closed_form_bound = 0.0;
    double linearized_bound = 0.0;
    double free_energy_shift = 0.0;
};

// Half the squared Hilbert-Schmidt distance from the maximally mixed state;
// the state-dependent coefficient scaling every entropy-gain bound below.
// Lies in [0, (2^n - 1) / 2^(n+1)], attained at pure states.
double entropy_gain_coefficient(const DensityMatrix& rho, int n);

// Certified gain after m applications of a channel with contraction rate c:
// coefficient * (1 - c^(2m)).
double contraction_gain_bound(double coefficient, double c, int m);

// Exact S(T^m(rho)) - S(rho) under local stochastic noise.
double entropy_gain(const DensityMatrix& rho, const LocalStochasticNoise& noise, int m);

// Binomial-expansion gain bound for T = (1-eps) id + eps R^(x)N:
// coefficient * sum_j C(m,j) (1-eps)^(m-j) eps^j (1 - c^(2j)).
// Exact integer binomials are used for m <= 64.
double binomial_gain_bound(double coefficient, double epsilon, double c, int m);

// Closed form of the same sum: coefficient * (1 - [1 - eps(1-c^2)]^m).
double closed_form_gain_bound(double coefficient, double epsilon, double c, int m);

// First-order expansion in eps: coefficient * m * eps * (1-c^2).
double linearized_gain_bound(double coefficient, double epsilon, double c, int m);

// E - delta_s / beta.
double free_energy_shift(const FreeEnergyParams& params, double delta_s);

// Smallest step counts at which the certified entropy gain drives the free
// energy shift strictly below zero, by the linearized and closed-form bounds.
CrashTimeResult crash_time(const FreeEnergyParams& params, double coefficient, double epsilon,
                           double c);

// Contraction rate used for reporting: exact for depolarizing (1 - lambda) and
// single-operator unitary channels (1), grid-estimated otherwise.
double reporting_contraction_rate(const QuantumChannel& r);

// One row per m in 0..m_max. Exact entropy gain is simulated when dim <= 256.
// free_energy_shift uses the exact gain when present, else the closed-form bound.
std::vector<TemporalBoundReport> temporal_report(const DensityMatrix& rho,
                                                 const LocalStochasticNoise& noise,
                                                 const FreeEnergyParams& params, int m_max,
                                                 std::optional<double> c_override = std::nullopt);

}  // namespace entroq
