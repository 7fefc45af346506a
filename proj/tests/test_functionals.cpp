#include <cmath>
#include <cstdint>
#include <limits>

#include "doctest.h"
#include "entroq/functionals.hpp"
#include "test_support.hpp"

using entroq::DensityMatrix;
using entroq::FreeEnergyParams;
using entroq::LocalStochasticNoise;
using entroq::QuantumChannel;

TEST_CASE("entropy_gain_coefficient") {
    SUBCASE("vanishes at the flat state") {
        for (int n : {1, 2, 3})
            CHECK(entroq::entropy_gain_coefficient(entroq::maximally_mixed(1 << n), n) <=
                  1e-15);
    }
    SUBCASE("pure qubit state attains the endpoint") {
        CHECK(entroq::entropy_gain_coefficient(entroq::pure_basis_state(2), 1) ==
              doctest::Approx(0.25));
    }
    SUBCASE("diagonal qubit state") {
        CHECK(entroq::entropy_gain_coefficient(testsup::diag_state({0.75, 0.25}), 1) ==
              doctest::Approx(0.0625));
    }
    SUBCASE("dimension must match the qubit count") {
        CHECK_THROWS_AS(entroq::entropy_gain_coefficient(entroq::maximally_mixed(4), 1),
                        entroq::DimMismatch);
    }
    SUBCASE("range over random states") {
        for (int n = 1; n <= 4; ++n) {
            const double cap = (std::pow(2.0, n) - 1.0) / std::pow(2.0, n + 1);
            for (std::uint64_t seed = 0; seed < 125; ++seed) {
                const int dim = 1 << n;
                const int rank = 1 + static_cast<int>(seed % dim);
                const double z = entroq::entropy_gain_coefficient(
                    entroq::random_density(dim, rank, seed), n);
                CHECK(z >= 0.0);
                CHECK(z <= cap + 1e-12);
            }
        }
    }
}

TEST_CASE("contraction_gain_bound") {
    CHECK(entroq::contraction_gain_bound(0.25, 0.9, 0) == 0.0);
    CHECK(entroq::contraction_gain_bound(0.17, 0.0, 3) == doctest::Approx(0.17));
    CHECK(entroq::contraction_gain_bound(0.25, 0.9, 2) == doctest::Approx(0.085975));
}

TEST_CASE("entropy_gain") {
    const LocalStochasticNoise noise(1.0, QuantumChannel::depolarizing(0.4), 1);
    SUBCASE("no steps, no gain") {
        CHECK(entroq::entropy_gain(entroq::random_density(2, 2, 3), noise, 0) == 0.0);
    }
    SUBCASE("flat state gains nothing") {
        for (int m : {1, 3, 5})
            CHECK(std::abs(entroq::entropy_gain(entroq::maximally_mixed(2), noise, m)) <=
                  1e-12);
    }
    SUBCASE("single full-strength step from a basis state") {
        CHECK(entroq::entropy_gain(entroq::pure_basis_state(2), noise, 1) ==
              doctest::Approx(0.5004024235381879));
    }
}

TEST_CASE("gain bound family") {
    SUBCASE("binomial form boundary cases") {
        CHECK(entroq::binomial_gain_bound(0.25, 0.0, 0.5, 7) == 0.0);
        CHECK(entroq::binomial_gain_bound(0.25, 0.3, 0.5, 1) ==
              doctest::Approx(0.25 * 0.3 * 0.75));
    }
    SUBCASE("binomial and closed forms agree") {
        for (double eps : {0.0, 0.1, 0.5, 1.0})
            for (double c : {0.0, 0.5, 0.9, 1.0})
                for (int m = 0; m <= 64; ++m)
                    CHECK(std::abs(entroq::binomial_gain_bound(0.25, eps, c, m) -
                                   entroq::closed_form_gain_bound(0.25, eps, c, m)) <= 1e-12);
    }
    SUBCASE("closed form saturates monotonically") {
        double prev = -1.0;
        for (int m = 0; m <= 200; ++m) {
            const double v = entroq::closed_form_gain_bound(0.25, 0.3, 0.6, m);
            CHECK(v >= prev);
            CHECK(v <= 0.25 + 1e-15);
            prev = v;
        }
    }
    SUBCASE("frozen spot value") {
        CHECK(entroq::closed_form_gain_bound(0.25, 0.01, 0.9, 10) ==
              doctest::Approx(0.004709592587372247).epsilon(1e-13));
    }
    SUBCASE("linearized form") {
        CHECK(entroq::linearized_gain_bound(0.25, 0.0, 0.5, 9) == 0.0);
        CHECK(entroq::linearized_gain_bound(0.25, 1e-3, 0.9, 100) ==
              doctest::Approx(0.00475).epsilon(1e-12));
        // second-order remainder controls the gap to the closed form
        for (int m : {1, 5, 20}) {
            const double x = m * 0.01 * (1 - 0.81);
            const double gap = std::abs(entroq::closed_form_gain_bound(0.25, 0.01, 0.9, m) -
                                        entroq::linearized_gain_bound(0.25, 0.01, 0.9, m));
            CHECK(gap <= 0.25 * x * x / 2 + 1e-15);
        }
    }
}

TEST_CASE("free_energy_shift") {
    const FreeEnergyParams params(2.0, 1.0);
    CHECK(entroq::free_energy_shift(params, 0.0) == doctest::Approx(1.0));
    CHECK(entroq::free_energy_shift(params, 2.0) == doctest::Approx(0.0));
    CHECK(entroq::free_energy_shift(params, 3.0) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(FreeEnergyParams(0.0, 1.0), entroq::InvariantViolation);
    CHECK_THROWS_AS(FreeEnergyParams(1.0, -2.0), entroq::InvariantViolation);
}

TEST_CASE("crash_time") {
    SUBCASE("saturating regime reports the linearized estimate only") {
        const auto r = entroq::crash_time(FreeEnergyParams(1.0, 1.0), 0.25, 1e-3, 0.9);
        CHECK_FALSE(r.never);
        CHECK(r.bound_saturates);
        CHECK(r.m_linearized == 21053);
        CHECK_FALSE(r.m_exact.has_value());
    }
    SUBCASE("small budget crosses immediately") {
        const auto r = entroq::crash_time(FreeEnergyParams(1.0, 0.1), 0.25, 0.5, 0.0);
        CHECK_FALSE(r.never);
        CHECK_FALSE(r.bound_saturates);
        REQUIRE(r.m_exact.has_value());
        CHECK(*r.m_exact == 1);
        CHECK(r.m_linearized == 1);
    }
    SUBCASE("degenerate noise never certifies a crash") {
        CHECK(entroq::crash_time(FreeEnergyParams(1.0, 1.0), 0.25, 0.0, 0.9).never);
        CHECK(entroq::crash_time(FreeEnergyParams(1.0, 1.0), 0.25, 0.5, 1.0).never);
        CHECK(entroq::crash_time(FreeEnergyParams(1.0, 1.0), 0.0, 0.5, 0.9).never);
    }
    SUBCASE("exact crossing is tight on a parameter grid") {
        for (double budget : {0.01, 0.05, 0.2})
            for (double eps : {0.05, 0.3, 1.0})
                for (double c : {0.0, 0.5, 0.9}) {
                    const double zeta = 0.25;
                    const auto r =
                        entroq::crash_time(FreeEnergyParams(1.0, budget), zeta, eps, c);
                    REQUIRE(r.m_exact.has_value());
                    const std::uint64_t star = *r.m_exact;
                    CHECK(entroq::closed_form_gain_bound(zeta, eps, c,
                                                         static_cast<int>(star)) > budget);
                    CHECK(entroq::closed_form_gain_bound(zeta, eps, c,
                                                         static_cast<int>(star - 1)) <=
                          budget);
                }
    }
    SUBCASE("linearized crossing is tight") {
        for (double budget : {0.01, 0.7, 3.0}) {
            const auto r = entroq::crash_time(FreeEnergyParams(1.0, budget), 0.25, 0.01, 0.9);
            const std::uint64_t m = r.m_linearized;
            CHECK(entroq::linearized_gain_bound(0.25, 0.01, 0.9, static_cast<int>(m)) >
                  budget);
            CHECK(entroq::linearized_gain_bound(0.25, 0.01, 0.9, static_cast<int>(m - 1)) <=
                  budget);
        }
    }
}

TEST_CASE("temporal_report") {
    const LocalStochasticNoise noise(0.4, QuantumChannel::depolarizing(0.3), 2);
    const DensityMatrix rho = entroq::random_density(4, 4, 21);
    const FreeEnergyParams params(2.0, 0.8);

    SUBCASE("zero horizon yields the initial row") {
        const auto rows = entroq::temporal_report(rho, noise, params, 0);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].m == 0);
        CHECK(rows[0].entropy_gain_exact.value() == doctest::Approx(0.0));
        CHECK(rows[0].free_energy_shift == doctest::Approx(0.8));
    }
    SUBCASE("exact gain dominates every certified bound") {
        const auto rows = entroq::temporal_report(rho, noise, params, 8);
        REQUIRE(rows.size() == 9);
        double prev_shift = std::numeric_limits<double>::infinity();
        for (const auto& row : rows) {
            REQUIRE(row.entropy_gain_exact.has_value());
            CHECK(*row.entropy_gain_exact >= row.binomial_bound - 1e-9);
            CHECK(std::abs(row.binomial_bound - row.closed_form_bound) <= 1e-10);
            CHECK(row.free_energy_shift <= prev_shift + 1e-12);
            prev_shift = row.free_energy_shift;
        }
    }
    SUBCASE("large systems omit the exact column") {
        const LocalStochasticNoise wide(0.1, QuantumChannel::depolarizing(0.3), 9);
        const auto rows = entroq::temporal_report(entroq::maximally_mixed(512), wide,
                                                  params, 2);
        REQUIRE(rows.size() == 3);
        for (const auto& row : rows) CHECK_FALSE(row.entropy_gain_exact.has_value());
    }
}
