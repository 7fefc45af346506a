#include <cmath>
#include <vector>

#include "doctest.h"
#include "entroq/functionals.hpp"
#include "entroq/simulator.hpp"
#include "test_support.hpp"

using entroq::Circuit;
using entroq::ComplexMatrix;
using entroq::DensityMatrix;
using entroq::Gate;
using entroq::GateLayer;
using entroq::LocalStochasticNoise;
using entroq::QuantumChannel;

namespace {

GateLayer single(std::vector<int> targets, ComplexMatrix m) {
    return GateLayer{{Gate{std::move(targets), std::move(m)}}};
}

}  // namespace

TEST_CASE("layer validation") {
    const ComplexMatrix x = testsup::pauli_x();
    SUBCASE("overlapping targets rejected") {
        const GateLayer layer{{Gate{{0}, x}, Gate{{0}, testsup::hadamard()}}};
        CHECK_THROWS_WITH_AS(entroq::validate_layer(layer, 2, 2),
                             doctest::Contains("already used"), entroq::BadLayer);
        const GateLayer dup{{Gate{{1, 1}, testsup::cnot()}}};
        CHECK_THROWS_AS(entroq::validate_layer(dup, 2, 2), entroq::BadLayer);
    }
    SUBCASE("out-of-range target rejected") {
        CHECK_THROWS_AS(entroq::validate_layer(single({2}, x), 2, 2), entroq::BadLayer);
        CHECK_THROWS_AS(entroq::validate_layer(single({-1}, x), 2, 2), entroq::BadLayer);
    }
    SUBCASE("arity and dimension must agree") {
        CHECK_THROWS_AS(entroq::validate_layer(single({0, 1}, x), 2, 2), entroq::BadLayer);
        CHECK_THROWS_AS(entroq::validate_layer(single({0, 1, 2}, ComplexMatrix::Identity(8, 8)),
                                               3, 3),
                        entroq::BadLayer);
    }
    SUBCASE("non-unitary matrix rejected") {
        ComplexMatrix bad(2, 2);
        bad << 1, 0, 0, 0.5;
        CHECK_THROWS_WITH_AS(entroq::validate_layer(single({0}, bad), 1, 1),
                             doctest::Contains("unitary"), entroq::BadLayer);
    }
    SUBCASE("per-layer gate budget enforced") {
        const GateLayer layer{{Gate{{0}, x}, Gate{{1}, x}}};
        CHECK_THROWS_WITH_AS(entroq::validate_layer(layer, 2, 1, 3),
                             doctest::Contains("layer 3"), entroq::BadLayer);
        CHECK_NOTHROW(entroq::validate_layer(layer, 2, 2));
    }
}

TEST_CASE("Circuit construction") {
    CHECK_THROWS_AS(Circuit(13, {}), entroq::SizeLimit);
    CHECK_THROWS_AS(Circuit(0, {}), entroq::Error);
    const Circuit c(3, {single({0}, testsup::pauli_x())});
    CHECK(c.gate_bound() == 3);  // defaults to the qubit count
    CHECK_THROWS_AS(Circuit(2, {GateLayer{{Gate{{0}, testsup::pauli_x()},
                                           Gate{{1}, testsup::pauli_x()}}}},
                            1),
                    entroq::BadLayer);
}

TEST_CASE("apply_gate_layer") {
    SUBCASE("empty layer is the identity") {
        const DensityMatrix rho = entroq::random_density(4, 4, 14);
        CHECK((entroq::apply_gate_layer(rho, GateLayer{}, 2).matrix() - rho.matrix())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-15);
    }
    SUBCASE("bit flip moves a basis state") {
        const DensityMatrix out = entroq::apply_gate_layer(entroq::pure_basis_state(2),
                                                           single({0}, testsup::pauli_x()), 1);
        CHECK(out.matrix()(1, 1).real() == doctest::Approx(1.0));
    }
    SUBCASE("entangler builds a correlated pure state") {
        // |+0> -> maximally correlated pair; global entropy stays zero
        const ComplexMatrix plus =
            0.5 * (ComplexMatrix::Identity(2, 2) + testsup::pauli_x());
        const DensityMatrix in(
            entroq::tensor_product(plus, entroq::pure_basis_state(2).matrix()));
        const DensityMatrix out =
            entroq::apply_gate_layer(in, single({0, 1}, testsup::cnot()), 2);
        CHECK(out.matrix()(0, 0).real() == doctest::Approx(0.5));
        CHECK(out.matrix()(3, 3).real() == doctest::Approx(0.5));
        CHECK(out.matrix()(0, 3).real() == doctest::Approx(0.5));
        CHECK(entroq::von_neumann_entropy(out) <= 1e-9);
    }
    SUBCASE("two-qubit gates embed on non-adjacent targets") {
        // control on the leftmost qubit, target on the rightmost: |100> -> |101>
        const DensityMatrix in = entroq::pure_basis_state(8, 4);
        const DensityMatrix out =
            entroq::apply_gate_layer(in, single({0, 2}, testsup::cnot()), 3);
        CHECK(out.matrix()(5, 5).real() == doctest::Approx(1.0));
    }
    SUBCASE("disjoint gates commute within a layer") {
        const DensityMatrix rho = entroq::random_density(4, 4, 15);
        const GateLayer ab{{Gate{{0}, testsup::pauli_x()}, Gate{{1}, testsup::hadamard()}}};
        const GateLayer ba{{Gate{{1}, testsup::hadamard()}, Gate{{0}, testsup::pauli_x()}}};
        CHECK((entroq::apply_gate_layer(rho, ab, 2).matrix() -
               entroq::apply_gate_layer(rho, ba, 2).matrix())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }
    SUBCASE("entropy is preserved") {
        const DensityMatrix rho = entroq::random_density(8, 5, 16);
        GateLayer layer{{Gate{{0, 2}, entroq::random_haar_unitary(4, 1)},
                         Gate{{1}, entroq::random_haar_unitary(2, 2)}}};
        const DensityMatrix out = entroq::apply_gate_layer(rho, layer, 3);
        CHECK(std::abs(entroq::von_neumann_entropy(out) - entroq::von_neumann_entropy(rho)) <=
              1e-9);
    }
}

TEST_CASE("step composes gates then noise") {
    const LocalStochasticNoise noise(1.0, QuantumChannel::depolarizing(0.4), 1);
    const DensityMatrix zero = entroq::pure_basis_state(2);
    SUBCASE("flip then full-strength smoothing") {
        const DensityMatrix out = entroq::step(zero, single({0}, testsup::pauli_x()), noise);
        CHECK(out.matrix()(0, 0).real() == doctest::Approx(0.2));
        CHECK(out.matrix()(1, 1).real() == doctest::Approx(0.8));
    }
    SUBCASE("noise-free step is pure unitary evolution") {
        const LocalStochasticNoise off(0.0, QuantumChannel::depolarizing(0.4), 1);
        const DensityMatrix out = entroq::step(zero, single({0}, testsup::pauli_x()), off);
        CHECK(out.matrix()(1, 1).real() == doctest::Approx(1.0));
    }
    SUBCASE("empty layer is a pure noise step") {
        const DensityMatrix out = entroq::step(zero, GateLayer{}, noise);
        CHECK((out.matrix() - entroq::noise_step(noise, zero).matrix())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-15);
    }
}

TEST_CASE("run ledger") {
    const entroq::FreeEnergyParams params(2.0, 1.0);
    SUBCASE("zero layers produce only the initial row") {
        const Circuit empty(2, {});
        const LocalStochasticNoise noise(0.1, QuantumChannel::depolarizing(0.2), 2);
        const auto ledger =
            entroq::run(empty, noise, entroq::pure_basis_state(4), params, 0.8);
        REQUIRE(ledger.rows.size() == 1);
        CHECK(ledger.rows[0].m == 0);
        CHECK(ledger.rows[0].delta_s == 0.0);
        CHECK(ledger.rows[0].gain_bound == 0.0);
        CHECK(ledger.rows[0].delta_f == doctest::Approx(1.0));
        CHECK_FALSE(ledger.rows[0].crashed);
    }
    SUBCASE("bounds and monotonicity hold along a random circuit") {
        std::vector<GateLayer> layers;
        for (int l = 0; l < 12; ++l)
            layers.push_back(single({l % 3}, entroq::random_haar_unitary(2, 300 + l)));
        const Circuit circuit(3, std::move(layers));
        const double lambda = 0.25;
        const LocalStochasticNoise noise(0.3, QuantumChannel::depolarizing(lambda), 3);
        const auto ledger = entroq::run(circuit, noise, entroq::pure_basis_state(8), params,
                                        1.0 - lambda);
        REQUIRE(ledger.rows.size() == 13);
        CHECK(ledger.c_used == 1.0 - lambda);
        CHECK(ledger.gain_coefficient ==
              doctest::Approx(entroq::entropy_gain_coefficient(entroq::pure_basis_state(8), 3)));
        double prev_entropy = -1.0;
        for (const auto& row : ledger.rows) {
            CHECK(row.entropy >= prev_entropy - 1e-9);
            CHECK(row.delta_s >= row.gain_bound - 1e-9);
            CHECK(row.delta_f ==
                  doctest::Approx(entroq::free_energy_shift(params, row.delta_s)));
            prev_entropy = row.entropy;
        }
        const double final_ds = ledger.rows.back().delta_s;
        CHECK(final_ds <= 3.0 * std::log(2.0) + 1e-9);
    }
    SUBCASE("runs are deterministic") {
        std::vector<GateLayer> layers = {single({0}, entroq::random_haar_unitary(2, 9)),
                                         single({0, 1}, entroq::random_haar_unitary(4, 10))};
        const Circuit circuit(2, std::move(layers));
        const LocalStochasticNoise noise(0.2, QuantumChannel::depolarizing(0.3), 2);
        const DensityMatrix rho0 = entroq::random_density(4, 4, 11);
        const auto a = entroq::run(circuit, noise, rho0, params, 0.7);
        const auto b = entroq::run(circuit, noise, rho0, params, 0.7);
        REQUIRE(a.rows.size() == b.rows.size());
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(a.rows[i].entropy == b.rows[i].entropy);
            CHECK(a.rows[i].delta_s == b.rows[i].delta_s);
            CHECK(a.rows[i].delta_f == b.rows[i].delta_f);
        }
    }
    SUBCASE("crash flag and stop-on-crash") {
        // tiny budget so the free energy crosses zero almost immediately
        const entroq::FreeEnergyParams tight(1.0, 0.05);
        std::vector<GateLayer> layers(6, GateLayer{});
        const Circuit circuit(1, std::move(layers));
        const LocalStochasticNoise noise(1.0, QuantumChannel::depolarizing(0.8), 1);
        const auto full =
            entroq::run(circuit, noise, entroq::pure_basis_state(2), tight, 0.2);
        REQUIRE(full.rows.size() == 7);
        bool seen = false;
        for (const auto& row : full.rows) {
            if (row.crashed) seen = true;
            if (seen && row.m > 0) CHECK(row.delta_f < 0.0);
        }
        CHECK(seen);

        entroq::RunOptions stop;
        stop.stop_on_crash = true;
        const auto cut =
            entroq::run(circuit, noise, entroq::pure_basis_state(2), tight, 0.2, stop);
        CHECK(cut.rows.size() < full.rows.size());
        CHECK(cut.rows.back().crashed);
    }
}
