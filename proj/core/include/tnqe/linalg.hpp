#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace tnqe {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

constexpr bool is_power_of_two(std::size_t v) noexcept { return v != 0 && (v & (v - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t v) noexcept {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

// log2 of a power of two; throws InvalidInput otherwise.
int log2_exact(std::size_t v);

// ceil(log2(v)) for v >= 1.
int ceil_log2(std::size_t v) noexcept;

// ||A^H A - I||_F
double isometry_residual(const CMatrix& a);

// ||U^H U - I||_F for square U.
double unitarity_residual(const CMatrix& u);

// Thin SVD A = U diag(S) V^H. Each right singular vector is rotated so that
// its largest-magnitude entry is real and positive (ties go to the lowest
// index); the matching left vector absorbs the conjugate phase.
struct Svd {
    CMatrix u;
    Eigen::VectorXd s;
    CMatrix v;
};
Svd svd(const CMatrix& a);

// Real thin SVD; right singular vectors get the same sign convention.
struct RealSvd {
    RMatrix u;
    Eigen::VectorXd s;
    RMatrix v;
};
RealSvd svd(const RMatrix& a);

// ||a - e^{i phi} b||_F with phi chosen from the ratio of the entries at the
// largest-magnitude position of b.
double phase_aligned_residual(const CMatrix& a, const CMatrix& b);

// |<a|b>| for unit vectors; the global-phase-insensitive state fidelity.
double overlap(std::span<const cplx> a, std::span<const cplx> b);

// Multiplies `values` by the unit phase that makes their sum real and
// positive (falls back to the largest-magnitude entry when the sum vanishes).
void align_global_phase(std::span<cplx> values);

} // namespace tnqe
