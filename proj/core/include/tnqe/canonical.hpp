#pragma once

#include <vector>

#include "tnqe/linalg.hpp"
#include "tnqe/tensor.hpp"

namespace tnqe {

// Right-canonical MPS: every core's (left x 4*right) unfolding has
// orthonormal rows. Core 1 has unit Frobenius norm and the norm of the
// represented state is carried in `norm`.
struct CanonicalMps {
    std::vector<MpsCore> cores;
    double norm = 0.0;
};

// Merges physical legs and folds QttCores::scale into the first core.
std::vector<MpsCore> to_mps(const QttCores& cores);

// Zero-pads every internal bond to the next power of two.
std::vector<MpsCore> pad_bonds(std::vector<MpsCore> cores);

// Sweeps k = L..2: SVD of each unfolding, keeps V^H at core k and absorbs
// W * Sigma into core k-1. Bond dims are padded to powers of two first.
CanonicalMps right_canonicalize(std::vector<MpsCore> cores);

// Re-normalises core 1 to exactly unit norm. Throws InvalidInput for a zero
// state.
CanonicalMps normalize_global(CanonicalMps mps);

// ||A A^H - I||_F of the (left x 4*right) unfolding.
double right_isometry_residual(const MpsCore& core);

// Contraction of an MPS (times `norm` when given) in quantized order.
std::vector<cplx> contract_mps(const std::vector<MpsCore>& cores, double norm = 1.0);

// Extends an m x n isometry to an m x m unitary whose first n columns are
// `isometry` verbatim. Missing columns come from Gram-Schmidt over the
// standard basis e_0, e_1, ... (candidates whose projected residual is below
// 1e-8 are skipped). Throws InvalidInput when V^H V deviates from I by more
// than 1e-8 or m is not a power of two.
CMatrix complete_to_unitary(const CMatrix& isometry);

} // namespace tnqe
