#include "tnqe/canonical.hpp"

#include <cmath>
#include <string>

#include "tnqe/error.hpp"

namespace tnqe {

namespace {

using RowMajorC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMajorC unfold(const MpsCore& c) {
    return Eigen::Map<const RowMajorC>(c.data.data(), static_cast<Eigen::Index>(c.left),
                                       static_cast<Eigen::Index>(4 * c.right));
}

double frobenius(const MpsCore& c) {
    double acc = 0.0;
    for (const cplx& v : c.data) acc += std::norm(v);
    return std::sqrt(acc);
}

} // namespace

std::vector<MpsCore> to_mps(const QttCores& cores) {
    cores.validate();
    std::vector<MpsCore> out;
    out.reserve(cores.cores.size());
    for (const auto& c : cores.cores) out.push_back(merge_physical(c));
    for (cplx& v : out.front().data) v *= cores.scale;
    return out;
}

std::vector<MpsCore> pad_bonds(std::vector<MpsCore> cores) {
    for (std::size_t k = 0; k + 1 < cores.size(); ++k) {
        const std::size_t dim = cores[k].right;
        if (dim != cores[k + 1].left) throw StructuralError("bond mismatch after core " + std::to_string(k + 1));
        const std::size_t padded = next_power_of_two(dim);
        if (padded == dim) continue;

        MpsCore lhs(cores[k].left, padded);
        for (std::size_t a = 0; a < cores[k].left; ++a)
            for (int p = 0; p < 4; ++p)
                for (std::size_t b = 0; b < dim; ++b) lhs.at(a, p, b) = cores[k].at(a, p, b);
        MpsCore rhs(padded, cores[k + 1].right);
        for (std::size_t a = 0; a < dim; ++a)
            for (int p = 0; p < 4; ++p)
                for (std::size_t b = 0; b < cores[k + 1].right; ++b) rhs.at(a, p, b) = cores[k + 1].at(a, p, b);
        cores[k] = std::move(lhs);
        cores[k + 1] = std::move(rhs);
    }
    return cores;
}

CanonicalMps right_canonicalize(std::vector<MpsCore> cores) {
    if (cores.empty()) throw StructuralError("cannot canonicalise an empty MPS");
    cores = pad_bonds(std::move(cores));

    for (std::size_t k = cores.size() - 1; k >= 1; --k) {
        const MpsCore& cur = cores[k];
        const Svd dec = svd(CMatrix(unfold(cur)));
        const Eigen::Index m = dec.s.size();

        MpsCore iso(static_cast<std::size_t>(m), cur.right);
        Eigen::Map<RowMajorC>(iso.data.data(), m, static_cast<Eigen::Index>(4 * cur.right)) = dec.v.adjoint();

        // Absorb W * Sigma into the left neighbour.
        const CMatrix carry = dec.u * dec.s.cast<cplx>().asDiagonal();
        const MpsCore& prev = cores[k - 1];
        const Eigen::Map<const RowMajorC> prev_mat(prev.data.data(), static_cast<Eigen::Index>(prev.left * 4),
                                                   static_cast<Eigen::Index>(prev.right));
        MpsCore merged(prev.left, static_cast<std::size_t>(m));
        Eigen::Map<RowMajorC>(merged.data.data(), static_cast<Eigen::Index>(prev.left * 4), m) = prev_mat * carry;

        cores[k] = std::move(iso);
        cores[k - 1] = std::move(merged);
    }

    CanonicalMps out;
    out.norm = frobenius(cores.front());
    if (out.norm > 0.0) {
        for (cplx& v : cores.front().data) v /= out.norm;
    } else {
        std::fill(cores.front().data.begin(), cores.front().data.end(), cplx{0.0, 0.0});
        cores.front().data.front() = 1.0;
    }
    out.cores = std::move(cores);
    return out;
}

CanonicalMps normalize_global(CanonicalMps mps) {
    if (mps.cores.empty()) throw StructuralError("cannot normalise an empty MPS");
    if (!(mps.norm > 0.0)) throw InvalidInput("cannot normalise a zero-norm state");
    const double n = frobenius(mps.cores.front());
    if (!(n > 0.0)) throw InvalidInput("cannot normalise a zero-norm state");
    for (cplx& v : mps.cores.front().data) v /= n;
    mps.norm *= n;
    return mps;
}

double right_isometry_residual(const MpsCore& core) {
    const RowMajorC a = unfold(core);
    const CMatrix gram = a * a.adjoint();
    return (gram - CMatrix::Identity(gram.rows(), gram.cols())).norm();
}

std::vector<cplx> contract_mps(const std::vector<MpsCore>& cores, double norm) {
    if (cores.empty()) throw StructuralError("cannot contract an empty MPS");
    if (cores.front().left != 1 || cores.back().right != 1)
        throw StructuralError("MPS boundary bond dimensions must be 1");
    RowMajorC env = unfold(cores.front());
    env = Eigen::Map<RowMajorC>(env.data(), 4, static_cast<Eigen::Index>(cores.front().right)).eval();
    for (std::size_t k = 1; k < cores.size(); ++k) {
        if (cores[k].left != cores[k - 1].right)
            throw StructuralError("bond mismatch before core " + std::to_string(k + 1));
        RowMajorC next = env * unfold(cores[k]);
        env = Eigen::Map<RowMajorC>(next.data(), next.rows() * 4, static_cast<Eigen::Index>(cores[k].right));
    }
    std::vector<cplx> values(env.data(), env.data() + env.size());
    for (cplx& v : values) v *= norm;
    return values;
}

CMatrix complete_to_unitary(const CMatrix& isometry) {
    const Eigen::Index m = isometry.rows();
    const Eigen::Index n = isometry.cols();
    if (!is_power_of_two(static_cast<std::size_t>(m)))
        throw InvalidInput("isometry row count " + std::to_string(m) + " is not a power of two");
    if (n > m) throw InvalidInput("isometry has more columns than rows");
    if (isometry_residual(isometry) > 1e-8) throw InvalidInput("matrix is not an isometry (V^H V != I)");

    CMatrix u = CMatrix::Zero(m, m);
    u.leftCols(n) = isometry;
    Eigen::Index filled = n;
    for (Eigen::Index cand = 0; cand < m && filled < m; ++cand) {
        CVector w = CVector::Zero(m);
        w(cand) = 1.0;
        w -= u.leftCols(filled) * (u.leftCols(filled).adjoint() * w);
        if (w.norm() < 1e-8) continue;
        // Second pass restores orthogonality lost to cancellation.
        w -= u.leftCols(filled) * (u.leftCols(filled).adjoint() * w);
        u.col(filled++) = w / w.norm();
    }
    return u;
}

} // namespace tnqe
