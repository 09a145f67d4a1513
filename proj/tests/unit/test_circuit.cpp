#include "doctest.h"

#include <numbers>

#include "support/oracles.hpp"
#include "tnqe/circuit.hpp"
#include "tnqe/error.hpp"

using namespace tnqe;
using tnqe::oracle::Rng;
using std::numbers::pi;

namespace {

Circuit random_circuit(int qubits, int gates, Rng& rng) {
    std::uniform_int_distribution<int> kind(0, 3), q(0, qubits - 1);
    std::uniform_real_distribution<double> a(-pi, pi);
    Circuit c(qubits);
    for (int i = 0; i < gates; ++i) {
        switch (kind(rng)) {
        case 0: c.ry(q(rng), a(rng)); break;
        case 1: c.rz(q(rng), a(rng)); break;
        case 2: {
            const int ctl = q(rng);
            int tgt = q(rng);
            if (tgt == ctl) tgt = (ctl + 1) % qubits;
            c.cx(ctl, tgt);
            break;
        }
        default: {
            // two distinct qubits in arbitrary order
            const int x = q(rng);
            const int y = (x + 1 + q(rng) % (qubits - 1)) % qubits;
            c.add(OpaqueGate{{y, x}, oracle::random_unitary(4, rng)});
        }
        }
    }
    return c;
}

std::vector<cplx> state_of(const Circuit& c) {
    const StateVector s = simulate(c);
    return {s.amplitudes().begin(), s.amplitudes().end()};
}

} // namespace

TEST_CASE("simulate: vacuum, RY(pi), norm") {
    CHECK(state_of(Circuit(2)) == std::vector<cplx>{1.0, 0.0, 0.0, 0.0});
    Circuit c(1);
    c.ry(0, pi);
    const auto s = state_of(c);
    CHECK(std::abs(s[0]) <= 1e-15);
    CHECK(std::abs(s[1] - cplx{1.0, 0.0}) <= 1e-15);
}

TEST_CASE("qubit 0 is the most significant bit") {
    Circuit c(3);
    c.ry(0, pi);
    const auto s = state_of(c);
    CHECK(std::abs(s[4] - cplx{1.0, 0.0}) <= 1e-15);
    Circuit d(3);
    d.ry(2, pi);
    CHECK(std::abs(state_of(d)[1] - cplx{1.0, 0.0}) <= 1e-15);
}

TEST_CASE("simulate matches the dense Kronecker oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 4;
        const Circuit c = random_circuit(n, 5 + trial, rng);
        const auto want = oracle::apply_dense(c);
        CHECK(oracle::max_abs(state_of(c), want) <= 1e-12);
        CHECK(oracle::phase_residual(circuit_unitary(c), oracle::circuit_matrix(c)) <= 1e-12);
        CHECK(std::abs(simulate(c).norm() - 1.0) <= 1e-10);
    }
}

TEST_CASE("three-qubit five-gate circuit against the 8x8 product") {
    Circuit c(3);
    c.ry(0, 0.3);
    c.cx(0, 2);
    c.rz(2, -1.1);
    c.ry(1, 2.0);
    c.cx(1, 0);
    CHECK(oracle::max_abs(state_of(c), oracle::apply_dense(c)) <= 1e-12);
}

TEST_CASE("parallel kernels agree with the sequential ones bit for bit") {
    Rng rng(7);
    const Circuit c = random_circuit(16, 60, rng);
    StateVector a(16), b(16);
    apply(c, a, 1);
    apply(c, b, 4);
    CHECK(std::equal(a.amplitudes().begin(), a.amplitudes().end(), b.amplitudes().begin()));
}

TEST_CASE("composition and CNOT vacuum") {
    Rng rng(9);
    const Circuit c1 = random_circuit(3, 8, rng), c2 = random_circuit(3, 8, rng);
    Circuit both = c1;
    both.append(c2);
    StateVector s = simulate(c1);
    apply(c2, s);
    CHECK(oracle::max_abs(state_of(both), {s.amplitudes().begin(), s.amplitudes().end()}) <= 1e-12);

    Circuit cx(3);
    cx.cx(0, 1);
    cx.cx(2, 0);
    cx.cx(1, 2);
    CHECK(state_of(cx) == std::vector<cplx>{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("RX from RZ RY RZ up to global phase") {
    Rng rng(55);
    std::uniform_real_distribution<double> u(-2 * pi, 2 * pi);
    for (int i = 0; i < 20; ++i) {
        const double theta = u(rng);
        Circuit via(1);
        via.rz(0, pi / 2);
        via.ry(0, theta);
        via.rz(0, -pi / 2);
        CMatrix rx(2, 2);
        rx << std::cos(theta / 2), cplx{0, -std::sin(theta / 2)}, cplx{0, -std::sin(theta / 2)}, std::cos(theta / 2);
        Circuit direct(1);
        direct.add(OpaqueGate{{0}, rx});
        CHECK(overlap(simulate(via).amplitudes(), simulate(direct).amplitudes()) >= 1 - 1e-12);
        CHECK(phase_aligned_residual(circuit_unitary(via), rx) <= 1e-12);
    }
}

TEST_CASE("gate validation") {
    Circuit c(2);
    CHECK_THROWS_AS(c.ry(2, 0.1), StructuralError);
    CHECK_THROWS_AS(c.cx(1, 1), StructuralError);
    CHECK_THROWS_AS(c.rz(0, NAN), StructuralError);
    CHECK_THROWS_AS(c.add(OpaqueGate{{0, 1}, CMatrix::Ones(4, 4)}), StructuralError);
    CHECK_THROWS_AS(c.add(OpaqueGate{{0, 0}, CMatrix::Identity(4, 4)}), StructuralError);
    CHECK_THROWS_AS(c.add(OpaqueGate{{0}, CMatrix::Identity(4, 4)}), StructuralError);
    CHECK(c.empty());
}

TEST_CASE("qubit limit raises a resource error") {
    SimOptions opts;
    opts.qubit_limit = 4;
    CHECK_THROWS_AS(simulate(Circuit(5), opts), ResourceError);
    CHECK(simulate(Circuit(4), opts).dimension() == 16);
}

TEST_CASE("depth examples") {
    CHECK(depth(Circuit(3)) == 0);
    Circuit par(2);
    par.ry(0, 0.1);
    par.ry(1, 0.1);
    CHECK(depth(par) == 1);
    Circuit chain(2);
    chain.ry(0, 0.1);
    chain.cx(0, 1);
    chain.rz(1, 0.2);
    CHECK(depth(chain) == 3);

    Circuit fused(2);
    fused.ry(0, 0.1);
    fused.rz(0, 0.2);
    fused.ry(1, 0.3);
    fused.cx(0, 1);
    fused.ry(1, 0.1);
    fused.rz(1, 0.1);
    CHECK(depth(fused) == 5);
    CHECK(depth(fused, DepthMode::FusedSingleQubit) == 3);

    Circuit op(3);
    op.ry(2, 0.1);
    op.add(OpaqueGate{{0, 1}, CMatrix::Identity(4, 4)});
    op.cx(1, 2);
    CHECK(depth(op) == 2);
}

TEST_CASE("gate counts with and without fusion") {
    const GateCounts empty = counts(Circuit(4));
    CHECK(empty.total == 0);
    CHECK(empty.fused_total == 0);

    Circuit c(2);
    c.ry(0, 0.1);
    c.rz(0, 0.2);
    c.ry(1, 0.3);
    c.cx(0, 1);
    c.rz(0, 0.4);
    c.add(OpaqueGate{{1}, CMatrix::Identity(2, 2)});
    const GateCounts g = counts(c);
    CHECK(g.single_qubit == 4);
    CHECK(g.cnot == 1);
    CHECK(g.opaque == 1);
    CHECK(g.total == 6);
    CHECK(g.fused_single_qubit == 3);
    CHECK(g.fused_total == 5);
}

TEST_CASE("tensor_with: register offset, depth and Kronecker product") {
    Circuit a(2);
    a.ry(0, 0.3);
    a.cx(0, 1);
    a.rz(1, 0.7);
    Circuit b(3);
    b.ry(0, 1.0);
    b.cx(0, 1);
    b.cx(1, 2);
    b.ry(2, 0.4);
    b.rz(2, 0.9);
    CHECK(depth(a) == 3);
    CHECK(depth(b) == 5);
    const Circuit ab = tensor_with(a, b);
    CHECK(ab.qubits() == 5);
    CHECK(depth(ab) == 5);
    CHECK(oracle::max_abs(state_of(ab), oracle::kron(state_of(a), state_of(b))) <= 1e-12);

    const Circuit ae = tensor_with(a, Circuit(0));
    CHECK(ae.qubits() == 2);
    CHECK(ae.size() == a.size());
    CHECK(state_of(ae) == state_of(a));
}

TEST_CASE("append with a qubit map") {
    Circuit frag(2);
    frag.ry(0, 0.5);
    frag.cx(0, 1);
    Circuit host(4);
    const std::vector<int> map{3, 1};
    host.append(frag, map);
    Circuit want(4);
    want.ry(3, 0.5);
    want.cx(3, 1);
    CHECK(oracle::max_abs(state_of(host), state_of(want)) == 0.0);
    const std::vector<int> short_map{0};
    CHECK_THROWS(host.append(frag, short_map));
}
