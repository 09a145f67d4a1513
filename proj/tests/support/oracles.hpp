#pragma once

// Reference implementations for tests. Everything here is written
// independently of the library routines it is used to check: dense Kronecker
// gate matrices instead of the statevector kernels, brute-force index loops
// instead of the quantized reshapes, and so on.

#include <cstdint>
#include <random>
#include <vector>

#include "tnqe/circuit.hpp"
#include "tnqe/linalg.hpp"
#include "tnqe/tensor.hpp"

namespace tnqe::oracle {

using Rng = std::mt19937_64;

// Haar-ish unitary from the QR of a complex Gaussian matrix.
CMatrix random_unitary(std::size_t dim, Rng& rng);
// First n columns of a random unitary of size m.
CMatrix random_isometry(std::size_t m, std::size_t n, Rng& rng);
std::vector<cplx> random_state(std::size_t dim, Rng& rng);
std::vector<cplx> random_real_state(std::size_t dim, Rng& rng, bool nonnegative);
QttCores random_cores(int levels, std::size_t rank, Rng& rng, bool complex_entries = false);
Image random_image(std::size_t size, Rng& rng);

// 2^n x 2^n matrix of a gate, qubit 0 = most significant bit, built from
// Kronecker products and explicit index formulas.
CMatrix gate_matrix(const Gate& g, int qubits);
CMatrix circuit_matrix(const Circuit& c);
std::vector<cplx> apply_dense(const Circuit& c);

CMatrix kron(const CMatrix& a, const CMatrix& b);
std::vector<cplx> kron(const std::vector<cplx>& a, const std::vector<cplx>& b);

// Pixel (x, y) -> multi-index digits p_1..p_L from explicit bit loops.
std::vector<int> level_digits(std::size_t x, std::size_t y, int levels);
// Image from cores by a matrix-chain product per pixel (scale applied).
std::vector<cplx> chain_contract(const QttCores& cores, std::size_t size);

double max_abs(const std::vector<cplx>& a, const std::vector<cplx>& b);
double max_abs(const Image& a, const Image& b);
double fidelity(std::span<const cplx> a, std::span<const cplx> b);
// ||a - e^{i phi} b||_F with phi from the largest-magnitude entry ratio.
double phase_residual(const CMatrix& a, const CMatrix& b);

} // namespace tnqe::oracle
