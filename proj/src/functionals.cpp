#include "entroq/functionals.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "entroq/errors.hpp"

namespace entroq {

namespace {

constexpr std::uint64_t kStepCap = std::uint64_t{1} << 62;

void check_unit_interval(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0))
        throw InvariantViolation(std::string(name) + " must lie in [0,1], got " + std::to_string(x));
}

void check_nonnegative_steps(int m) {
    if (m < 0) throw Error("step count must be nonnegative");
}

}  // namespace

FreeEnergyParams::FreeEnergyParams(double beta_in, double energy_budget_in)
    : beta(beta_in), energy_budget(energy_budget_in) {
    if (!(beta > 0.0)) throw InvariantViolation("inverse temperature must be positive");
    if (!(energy_budget > 0.0)) throw InvariantViolation("energy budget must be positive");
}

double entropy_gain_coefficient(const DensityMatrix& rho, int n) {
    if (n < 1 || rho.dim() != (Eigen::Index{1} << n))
        throw DimMismatch("state dimension must be 2^n");
    const ComplexMatrix centered =
        rho.matrix() - ComplexMatrix::Identity(rho.dim(), rho.dim()) / static_cast<double>(rho.dim());
    const double d = hs_norm(centered);
    return 0.5 * d * d;
}

double contraction_gain_bound(double coefficient, double c, int m) {
    check_unit_interval(c, "contraction rate");
    check_nonnegative_steps(m);
    return coefficient * (1.0 - std::pow(c, 2.0 * m));
}

double entropy_gain(const DensityMatrix& rho, const LocalStochasticNoise& noise, int m) {
    return von_neumann_entropy(noise_step_power(noise, rho, m)) - von_neumann_entropy(rho);
}

double binomial_gain_bound(double coefficient, double epsilon, double c, int m) {
    check_unit_interval(epsilon, "noise strength");
    check_unit_interval(c, "contraction rate");
    check_nonnegative_steps(m);
    const double c2 = c * c;
    long double total = 0.0L;
    if (m <= 64) {
        // C(64,32) fits in 64 bits; the recurrence product needs 128.
        std::uint64_t binom = 1;
        for (int j = 0; j <= m; ++j) {
            total += static_cast<long double>(binom) * std::pow(1.0 - epsilon, m - j) *
                     std::pow(epsilon, j) * (1.0 - std::pow(c2, j));
            if (j < m)
                binom = static_cast<std::uint64_t>(static_cast<unsigned __int128>(binom) * (m - j) /
                                                   (j + 1));
        }
    } else {
        double binom = 1.0;
        for (int j = 0; j <= m; ++j) {
            total += static_cast<long double>(binom) * std::pow(1.0 - epsilon, m - j) *
                     std::pow(epsilon, j) * (1.0 - std::pow(c2, j));
            if (j < m) binom = binom * (m - j) / (j + 1);
        }
    }
    return coefficient * static_cast<double>(total);
}

double closed_form_gain_bound(double coefficient, double epsilon, double c, int m) {
    check_unit_interval(epsilon, "noise strength");
    check_unit_interval(c, "contraction rate");
    check_nonnegative_steps(m);
    return coefficient * (1.0 - std::pow(1.0 - epsilon * (1.0 - c * c), m));
}

double linearized_gain_bound(double coefficient, double epsilon, double c, int m) {
    check_unit_interval(epsilon, "noise strength");
    check_unit_interval(c, "contraction rate");
    check_nonnegative_steps(m);
    return coefficient * m * epsilon * (1.0 - c * c);
}

double free_energy_shift(const FreeEnergyParams& params, double delta_s) {
    return params.energy_budget - delta_s / params.beta;
}

CrashTimeResult crash_time(const FreeEnergyParams& params, double coefficient, double epsilon,
                           double c) {
    if (!(coefficient >= 0.0)) throw InvariantViolation("gain coefficient must be nonnegative");
    check_unit_interval(epsilon, "noise strength");
    check_unit_interval(c, "contraction rate");

    CrashTimeResult out;
    const double per_step = coefficient * epsilon * (1.0 - c * c);
    if (per_step <= 0.0) {
        out.never = true;
        return out;
    }

    const double budget = params.beta * params.energy_budget;

    // Linearized: smallest m with per_step * m strictly above the budget.
    const double ratio = budget / per_step;
    if (ratio >= static_cast<double>(kStepCap)) {
        out.m_linearized = std::numeric_limits<std::uint64_t>::max();
    } else {
        std::uint64_t m = static_cast<std::uint64_t>(std::ceil(ratio));
        if (per_step * static_cast<double>(m) <= budget) ++m;
        out.m_linearized = m;
    }

    // Closed-form bound saturates at the coefficient itself.
    if (budget >= coefficient) {
        out.bound_saturates = true;
        return out;
    }
    const double base = 1.0 - epsilon * (1.0 - c * c);
    const auto exceeds = [&](std::uint64_t m) {
        return coefficient * (1.0 - std::pow(base, static_cast<double>(m))) > budget;
    };
    std::uint64_t hi = 1;
    while (!exceeds(hi)) {
        if (hi >= kStepCap) {
            out.bound_saturates = true;  // crossing beyond any representable horizon
            return out;
        }
        hi *= 2;
    }
    std::uint64_t lo = hi / 2;  // exceeds(lo) is false (or lo == 0)
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (exceeds(mid) ? hi : lo) = mid;
    }
    out.m_exact = hi;
    return out;
}

double reporting_contraction_rate(const QuantumChannel& r) {
    if (r.is_depolarizing()) return 1.0 - r.lambda();
    if (r.kraus_ops().size() == 1) return 1.0;  // lone trace-preserving op is unitary
    return contraction_rate(r, 200).rate;
}

std::vector<TemporalBoundReport> temporal_report(const DensityMatrix& rho,
                                                 const LocalStochasticNoise& noise,
                                                 const FreeEnergyParams& params, int m_max,
                                                 std::optional<double> c_override) {
    if (m_max < 0) throw Error("step count must be nonnegative");
    if (rho.dim() != (Eigen::Index{1} << noise.num_qubits))
        throw DimMismatch("state dimension must be 2^num_qubits");

    const double c = c_override ? *c_override : reporting_contraction_rate(noise.local_channel);
    check_unit_interval(c, "contraction rate");
    const double coefficient = entropy_gain_coefficient(rho, noise.num_qubits);
    const bool exact = rho.dim() <= 256;
    const double s0 = exact ? von_neumann_entropy(rho) : 0.0;

    std::vector<TemporalBoundReport> rows;
    rows.reserve(m_max + 1);
    DensityMatrix state = rho;
    for (int m = 0; m <= m_max; ++m) {
        TemporalBoundReport row;
        row.m = m;
        if (exact) {
            if (m > 0) state = noise_step(noise, state);
            row.entropy_gain_exact = von_neumann_entropy(state) - s0;
        }
        row.contraction_bound = contraction_gain_bound(coefficient, c, m);
        row.binomial_bound = binomial_gain_bound(coefficient, noise.epsilon, c, m);
        row.closed_form_bound = closed_form_gain_bound(coefficient, noise.epsilon, c, m);
        row.linearized_bound = linearized_gain_bound(coefficient, noise.epsilon, c, m);
        row.free_energy_shift =
            free_energy_shift(params, row.entropy_gain_exact.value_or(row.closed_form_bound));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace entroq
