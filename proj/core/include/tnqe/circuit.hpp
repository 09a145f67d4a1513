#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tnqe/linalg.hpp"

namespace tnqe {

// Qubit 0 is the most significant bit of an amplitude index.
struct RyGate {
    int qubit = 0;
    double angle = 0.0;
};

struct RzGate {
    int qubit = 0;
    double angle = 0.0;
};

struct CnotGate {
    int control = 0;
    int target = 1;
};

// Dense k-qubit unitary; qubits[0] is the most significant bit of the
// matrix index.
struct OpaqueGate {
    std::vector<int> qubits;
    CMatrix matrix;
};

using Gate = std::variant<RyGate, RzGate, CnotGate, OpaqueGate>;

// 2x2 matrices, e^{-i a Y/2} and e^{-i a Z/2}.
Eigen::Matrix2cd ry_matrix(double angle);
Eigen::Matrix2cd rz_matrix(double angle);

std::vector<int> gate_qubits(const Gate& g);

class Circuit {
public:
    Circuit() = default;
    explicit Circuit(int qubits);

    int qubits() const noexcept { return qubits_; }
    const std::vector<Gate>& gates() const noexcept { return gates_; }
    std::size_t size() const noexcept { return gates_.size(); }
    bool empty() const noexcept { return gates_.empty(); }

    // Validates against the qubit count; throws StructuralError.
    void add(Gate g);
    void ry(int q, double angle) { add(RyGate{q, angle}); }
    void rz(int q, double angle) { add(RzGate{q, angle}); }
    void cx(int control, int target) { add(CnotGate{control, target}); }

    // Appends `other`, sending its qubit i to qubit_map[i].
    void append(const Circuit& other, std::span<const int> qubit_map);
    // Appends `other` on the same qubit indices.
    void append(const Circuit& other);

private:
    int qubits_ = 0;
    std::vector<Gate> gates_;
};

struct GateCounts {
    std::size_t single_qubit = 0; // RY + RZ gates
    std::size_t cnot = 0;
    std::size_t opaque = 0;
    std::size_t total = 0; // single_qubit + cnot + opaque
    // Maximal runs of consecutive single-qubit gates on one qubit count once.
    std::size_t fused_single_qubit = 0;
    std::size_t fused_total = 0;
};

GateCounts counts(const Circuit& c);

enum class DepthMode {
    Logical,          // every gate is one layer on the qubits it touches
    FusedSingleQubit, // consecutive single-qubit gates on a qubit share a layer
};

// Greedy ASAP layering in list order.
std::size_t depth(const Circuit& c, DepthMode mode = DepthMode::Logical);

// Disjoint-register concatenation; b's qubits are shifted by a.qubits().
Circuit tensor_with(const Circuit& a, const Circuit& b);

class StateVector {
public:
    StateVector() = default;
    // |0...0> on n qubits.
    explicit StateVector(int qubits);
    StateVector(int qubits, std::vector<cplx> amplitudes);

    int qubits() const noexcept { return qubits_; }
    std::size_t dimension() const noexcept { return amps_.size(); }
    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    std::span<cplx> amplitudes() noexcept { return amps_; }
    double norm() const;

private:
    int qubits_ = 0;
    std::vector<cplx> amps_;
};

struct SimOptions {
    int qubit_limit = 30;
    // 0 picks the default budget (hardware threads, capped by TNQE_THREADS).
    int threads = 0;
};

// Thread budget for internal parallelism: hardware concurrency, capped by the
// TNQE_THREADS environment variable when it is set.
int default_thread_budget();

// Applies the gates of `c` in order. State and circuit must agree on qubits.
void apply(const Circuit& c, StateVector& state, int threads = 1);
void apply(const Gate& g, std::span<cplx> amps, int qubits, int threads = 1);

// Throws ResourceError above the qubit limit.
StateVector simulate(const Circuit& c, const SimOptions& opts = {});

// Dense unitary of the circuit, built column by column.
CMatrix circuit_unitary(const Circuit& c);

} // namespace tnqe
