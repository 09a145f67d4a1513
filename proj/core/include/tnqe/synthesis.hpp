#pragma once

#include <array>
#include <span>

#include "tnqe/circuit.hpp"
#include "tnqe/linalg.hpp"

namespace tnqe {

enum class RotationAxis { Y, Z };

// Uniformly controlled rotation: for every basis state c of `controls`
// (controls[0] most significant) the target gets R(angles[c]). Emitted as
// the Gray-code ladder of 2^k rotations and CNOTs. With `prune` set,
// zero-angle rotations are dropped and the CNOTs around them merged;
// otherwise the full data-independent ladder is emitted.
void append_multiplexed_rotation(Circuit& circuit, RotationAxis axis, int target,
                                 std::span<const int> controls, std::span<const double> angles,
                                 bool prune = true);

// Circuit over log2(amps.size()) qubits with simulate(result) equal to amps
// up to a global phase. Real inputs use an RY-only tree; complex inputs add a
// diagonal phase stage of multiplexed RZ. Throws InvalidInput for vectors
// whose norm is not 1 within 1e-10. `prune` is forwarded to every
// multiplexed rotation.
Circuit prepare_state(std::span<const cplx> amps, bool prune = true);

struct SynthesisReport {
    int arity = 0;
    GateCounts counts;
    double residual = 0.0; // phase-aligned Frobenius recomposition error
    int recursion_depth = 0;
};

// Largest supported unitary arity.
inline constexpr int kMaxSynthesisArity = 6;

// Quantum Shannon decomposition into RY / RZ / CNOT. The global phase is
// dropped. Throws InvalidInput when U is not unitary within 1e-10 and
// ResourceError above kMaxSynthesisArity qubits.
Circuit decompose_unitary(const CMatrix& u, SynthesisReport* report = nullptr);

// Z-Y-Z Euler angles (a, b, c) with U = e^{i phi} RZ(a) RY(b) RZ(c).
std::array<double, 3> zyz_angles(const Eigen::Matrix2cd& u);

} // namespace tnqe
