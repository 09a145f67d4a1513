#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tnqe/circuit.hpp"
#include "tnqe/linalg.hpp"
#include "tnqe/tensor.hpp"

namespace tnqe {

enum class Method { Amplitude, Full, Core, Unitary };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

inline constexpr const char* kBitOrderTag = "qubit0-msb/level-interleaved-xy";

struct Register {
    std::string name;
    std::vector<int> qubits;
};

// Everything decode() needs to map a simulated state back to pixels.
struct EncodingLayout {
    Method method = Method::Amplitude;
    std::size_t image_size = 0;
    int levels = 0;
    int bond_qubits = 0;
    std::vector<Register> registers;
    // amplitude/full: l2 norm of the encoded tensor; unitary: pixel sum of
    // the target; core: QttCores::scale.
    double global_norm = 0.0;
    // core: ||v^(k)||_2 per core.
    std::vector<double> core_norms;
    // core: (r_{k-1}, r_k) per core.
    std::vector<std::pair<std::size_t, std::size_t>> core_bonds;
    std::string bit_order = kBitOrderTag;

    int qubit_count() const noexcept;
    void validate() const;
};

struct Encoding {
    Circuit circuit;
    EncodingLayout layout;
};

// Generic baseline: the full multiplexor ladder is emitted whatever the
// pixel values, so gate counts depend only on the image size.
Encoding encode_amplitude(const Image& img);

struct FullOptions {
    // false keeps each local unitary as an opaque gate.
    bool synthesize = true;
};

// Merge -> right-canonicalise -> normalise -> complete -> synthesise. Qubits
// 0..N_b-1 are the bond register, level k owns N_b + 2(k-1) and N_b + 2k - 1.
Encoding encode_full(const QttCores& cores, const FullOptions& opts = {});

// Each core on its own register of ceil(log2(4 r_{k-1} r_k)) qubits.
Encoding encode_core(const QttCores& cores);

// Angles of one parameterised block: alpha (RY) and beta (RZ) per layer and
// qubit. Local qubit order is [p0, p1, bond_0 .. bond_{N_b-1}].
class BlockParams {
public:
    BlockParams() = default;
    BlockParams(int bond_qubits, int layers);

    int bond_qubits() const noexcept { return bond_qubits_; }
    int arity() const noexcept { return bond_qubits_ + 2; }
    int layers() const noexcept { return layers_; }
    std::size_t parameter_count() const noexcept { return angles_.size(); }

    // Flat layout is [rotation (0 = alpha, 1 = beta)][qubit][layer].
    double& alpha(int layer, int qubit) { return angles_[index(0, qubit, layer)]; }
    double& beta(int layer, int qubit) { return angles_[index(1, qubit, layer)]; }
    double alpha(int layer, int qubit) const { return angles_[index(0, qubit, layer)]; }
    double beta(int layer, int qubit) const { return angles_[index(1, qubit, layer)]; }

    std::span<double> angles() noexcept { return angles_; }
    std::span<const double> angles() const noexcept { return angles_; }

private:
    std::size_t index(int rot, int qubit, int layer) const {
        return (static_cast<std::size_t>(rot) * arity() + qubit) * layers_ + layer;
    }

    int bond_qubits_ = 0;
    int layers_ = 0;
    std::vector<double> angles_;
};

// CNOTs of one entangler layer in local qubit indices, ordered into
// conflict-free layers (bond chain q -> q+1, bond q -> physical q mod 2,
// physical 0 -> physical 1).
std::vector<CnotGate> entangler_pattern(int bond_qubits);

// Gate-level fragment over the block's local qubits: per layer, RY then RZ on
// every qubit followed by the entangler.
Circuit block_fragment(const BlockParams& params);

struct BlockUnitary {
    CMatrix matrix;
    Circuit fragment;
};
BlockUnitary build_block_unitary(const BlockParams& params);

// A[a, i, j, b] = U[(2i + j) * R + b, a] for a < r_in, b < r_out, where
// R = 2^{N_b} and N_b = arity - 2. Throws InvalidInput when r_in or r_out
// exceed R.
QttCore extract_core(const CMatrix& u, std::size_t r_in, std::size_t r_out);

// Cores realised by a chain of blocks: boundary bonds are 1, internal bonds
// are the full 2^{N_b}.
QttCores unitary_cores(std::span<const BlockParams> blocks);

// Sequential circuit of native block fragments on N_b + 2L qubits. `mass` is
// the pixel sum stored for decoding.
Encoding encode_unitary(std::span<const BlockParams> blocks, double mass = 1.0);

// Bond qubits used for rank r: ceil(log2 r).
int bond_qubits_for_rank(std::size_t rank) noexcept;

// Inverse of the encodings, see EncodingLayout. Amplitude/full/core return
// the signed real reconstruction after global phase alignment; unitary
// returns the Born distribution of the bond-0 slice times the stored mass.
Image decode(const StateVector& state, const EncodingLayout& layout);

} // namespace tnqe
