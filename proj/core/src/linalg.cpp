#include "tnqe/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "tnqe/error.hpp"

namespace tnqe {

int log2_exact(std::size_t v) {
    if (!is_power_of_two(v)) throw InvalidInput(std::to_string(v) + " is not a power of two");
    int k = 0;
    while ((std::size_t{1} << k) < v) ++k;
    return k;
}

int ceil_log2(std::size_t v) noexcept {
    int k = 0;
    while ((std::size_t{1} << k) < v) ++k;
    return k;
}

double isometry_residual(const CMatrix& a) {
    const CMatrix gram = a.adjoint() * a;
    return (gram - CMatrix::Identity(gram.rows(), gram.cols())).norm();
}

double unitarity_residual(const CMatrix& u) { return isometry_residual(u); }

namespace {

template <typename Vec>
Eigen::Index dominant_index(const Vec& v) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        // Small relative slack so near-ties resolve to the lowest index on
        // every platform.
        const double mag = std::abs(v(i));
        if (mag > best_mag * (1.0 + 1e-12)) {
            best_mag = mag;
            best = i;
        }
    }
    return best;
}

} // namespace

Svd svd(const CMatrix& a) {
    Eigen::JacobiSVD<CMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Svd out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    for (Eigen::Index j = 0; j < out.v.cols(); ++j) {
        const cplx pivot = out.v(dominant_index(out.v.col(j)), j);
        if (std::abs(pivot) == 0.0) continue;
        const cplx phase = std::conj(pivot) / std::abs(pivot);
        out.v.col(j) *= phase;
        out.u.col(j) *= phase;
    }
    return out;
}

RealSvd svd(const RMatrix& a) {
    Eigen::JacobiSVD<RMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    RealSvd out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    for (Eigen::Index j = 0; j < out.v.cols(); ++j) {
        if (out.v(dominant_index(out.v.col(j)), j) < 0.0) {
            out.v.col(j) *= -1.0;
            out.u.col(j) *= -1.0;
        }
    }
    return out;
}

double phase_aligned_residual(const CMatrix& a, const CMatrix& b) {
    Eigen::Index r = 0, c = 0;
    b.cwiseAbs().maxCoeff(&r, &c);
    cplx phase{1.0, 0.0};
    if (std::abs(b(r, c)) > 0.0 && std::abs(a(r, c)) > 0.0) {
        const cplx ratio = a(r, c) / b(r, c);
        phase = ratio / std::abs(ratio);
    }
    return (a - phase * b).norm();
}

double overlap(std::span<const cplx> a, std::span<const cplx> b) {
    cplx acc{0.0, 0.0};
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(a[i]) * b[i];
    return std::abs(acc);
}

void align_global_phase(std::span<cplx> values) {
    cplx sum{0.0, 0.0};
    double mass = 0.0;
    for (const cplx& v : values) {
        sum += v;
        mass += std::abs(v);
    }
    if (mass == 0.0) return;
    cplx pivot = sum;
    if (std::abs(sum) <= 1e-12 * mass) {
        pivot = values[0];
        for (const cplx& v : values)
            if (std::abs(v) > std::abs(pivot)) pivot = v;
    }
    const cplx phase = std::conj(pivot) / std::abs(pivot);
    for (cplx& v : values) v *= phase;
}

} // namespace tnqe
