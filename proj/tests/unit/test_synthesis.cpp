#include "doctest.h"

#include <numbers>

#include "support/oracles.hpp"
#include "tnqe/error.hpp"
#include "tnqe/synthesis.hpp"

using namespace tnqe;
using tnqe::oracle::Rng;

namespace {

std::vector<cplx> state_of(const Circuit& c) {
    const StateVector s = simulate(c);
    return {s.amplitudes().begin(), s.amplitudes().end()};
}

bool native_only(const Circuit& c) {
    for (const Gate& g : c.gates())
        if (std::holds_alternative<OpaqueGate>(g)) return false;
    return true;
}

} // namespace

TEST_CASE("multiplexed rotation matches the block-diagonal oracle") {
    Rng rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k <= 4; ++k)
        for (RotationAxis axis : {RotationAxis::Y, RotationAxis::Z}) {
            const int n = k + 1;
            std::vector<int> controls;
            for (int q = 0; q < k; ++q) controls.push_back(q);
            std::vector<double> angles(std::size_t{1} << k);
            for (auto& a : angles) a = u(rng);
            if (k >= 2) angles[1] = 0.0; // exercise dropped rotations
            Circuit c(n);
            append_multiplexed_rotation(c, axis, k, controls, angles);
            CMatrix want = CMatrix::Zero(Eigen::Index{2} << k, Eigen::Index{2} << k);
            for (std::size_t i = 0; i < angles.size(); ++i) {
                const Eigen::Matrix2cd r = axis == RotationAxis::Y ? ry_matrix(angles[i]) : rz_matrix(angles[i]);
                want.block(static_cast<Eigen::Index>(2 * i), static_cast<Eigen::Index>(2 * i), 2, 2) = r;
            }
            CHECK((oracle::circuit_matrix(c) - want).norm() <= 1e-12);
            CHECK(counts(c).cnot <= (std::size_t{1} << k));
        }
}

TEST_CASE("prepare_state: basis state needs no gates") {
    std::vector<cplx> e0(8, 0.0);
    e0[0] = 1.0;
    const Circuit c = prepare_state(e0);
    CHECK(c.qubits() == 3);
    CHECK(c.empty());
}

TEST_CASE("prepare_state round trips random vectors") {
    Rng rng(31);
    for (int n = 1; n <= 5; ++n)
        for (int trial = 0; trial < 100; ++trial) {
            const auto v = trial % 3 == 0   ? oracle::random_real_state(std::size_t{1} << n, rng, true)
                           : trial % 3 == 1 ? oracle::random_real_state(std::size_t{1} << n, rng, false)
                                            : oracle::random_state(std::size_t{1} << n, rng);
            const Circuit c = prepare_state(v);
            CHECK(native_only(c));
            CHECK(oracle::fidelity(state_of(c), v) >= 1 - 1e-10);
        }
}

TEST_CASE("prepare_state: sparse, real signed and nonnegative inputs") {
    Rng rng(1);
    const auto v = oracle::random_real_state(8, rng, true);
    CHECK(oracle::fidelity(state_of(prepare_state(v)), v) >= 1 - 1e-10);
    // nonnegative real input is reproduced exactly, not just up to phase
    CHECK(oracle::max_abs(state_of(prepare_state(v)), v) <= 1e-12);

    std::vector<cplx> sparse(16, 0.0);
    sparse[5] = cplx{0.6, 0.0};
    sparse[12] = cplx{0.0, -0.8};
    CHECK(oracle::fidelity(state_of(prepare_state(sparse)), sparse) >= 1 - 1e-12);
}

TEST_CASE("prepare_state: 10 qubits and depth range") {
    Rng rng(1024);
    const auto v = oracle::random_real_state(1024, rng, true);
    const Circuit c = prepare_state(v);
    CHECK(c.qubits() == 10);
    const std::size_t d = depth(c);
    CHECK(d >= 1024);
    CHECK(d <= 4 * 1024);
    CHECK(oracle::fidelity(state_of(c), v) >= 1 - 1e-10);
}

TEST_CASE("prepare_state rejects bad vectors") {
    CHECK_THROWS_AS(prepare_state(std::vector<cplx>(4, 0.0)), InvalidInput);
    CHECK_THROWS_AS(prepare_state(std::vector<cplx>(4, 1.0)), InvalidInput);
    CHECK_THROWS_AS(prepare_state(std::vector<cplx>(3, 1.0 / std::sqrt(3.0))), InvalidInput);
}

TEST_CASE("zyz angles reproduce single-qubit unitaries") {
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        const Eigen::Matrix2cd u = oracle::random_unitary(2, rng);
        const auto [a, b, c] = zyz_angles(u);
        const Eigen::Matrix2cd r = rz_matrix(a) * ry_matrix(b) * rz_matrix(c);
        CHECK(phase_aligned_residual(r, u) <= 1e-12);
    }
    const Circuit c = decompose_unitary(oracle::random_unitary(2, rng));
    CHECK(c.size() <= 3);
    CHECK(counts(c).cnot == 0);
}

TEST_CASE("decompose_unitary recomposes for arities 1..4") {
    Rng rng(1234);
    for (int k = 1; k <= 4; ++k)
        for (int trial = 0; trial < 50; ++trial) {
            const CMatrix u = oracle::random_unitary(std::size_t{1} << k, rng);
            SynthesisReport rep;
            const Circuit c = decompose_unitary(u, &rep);
            CHECK(native_only(c));
            CHECK(c.qubits() == k);
            CHECK(oracle::phase_residual(oracle::circuit_matrix(c), u) <= 1e-8);
            CHECK(rep.residual <= 1e-8);
            CHECK(rep.arity == k);
            CHECK(counts(c).cnot <= (std::size_t{1} << (2 * k)));
        }
}

TEST_CASE("decompose_unitary tolerances from the examples") {
    Rng rng(6);
    const CMatrix u2 = oracle::random_unitary(4, rng);
    CHECK(oracle::phase_residual(oracle::circuit_matrix(decompose_unitary(u2)), u2) <= 1e-9);
    const CMatrix u3 = oracle::random_unitary(8, rng);
    CHECK(oracle::phase_residual(oracle::circuit_matrix(decompose_unitary(u3)), u3) <= 1e-8);
    const CMatrix u5 = oracle::random_unitary(32, rng);
    CHECK(oracle::phase_residual(circuit_unitary(decompose_unitary(u5)), u5) <= 1e-8);
}

TEST_CASE("decompose_unitary: structured inputs") {
    CHECK(decompose_unitary(CMatrix::Identity(8, 8)).empty());
    CHECK(decompose_unitary(std::polar(1.0, 0.3) * CMatrix::Identity(4, 4)).empty());

    // permutation (CNOT-like) and block-diagonal unitaries
    Rng rng(3);
    Circuit cx(3);
    cx.cx(0, 2);
    cx.cx(2, 1);
    const CMatrix perm = oracle::circuit_matrix(cx);
    CHECK(oracle::phase_residual(oracle::circuit_matrix(decompose_unitary(perm)), perm) <= 1e-8);
    CMatrix bd = CMatrix::Zero(8, 8);
    bd.topLeftCorner(4, 4) = oracle::random_unitary(4, rng);
    bd.bottomRightCorner(4, 4) = oracle::random_unitary(4, rng);
    CHECK(oracle::phase_residual(oracle::circuit_matrix(decompose_unitary(bd)), bd) <= 1e-8);
    const CMatrix same = oracle::kron(CMatrix::Identity(2, 2), oracle::random_unitary(4, rng));
    CHECK(oracle::phase_residual(oracle::circuit_matrix(decompose_unitary(same)), same) <= 1e-8);
}

TEST_CASE("decompose_unitary errors") {
    CHECK_THROWS_AS(decompose_unitary(CMatrix::Ones(4, 4)), InvalidInput);
    CHECK_THROWS_AS(decompose_unitary(CMatrix::Identity(3, 3)), InvalidInput);
    CHECK_THROWS_AS(decompose_unitary(CMatrix::Identity(128, 128)), ResourceError);
}
