#include "tnqe/synthesis.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "tnqe/error.hpp"

namespace tnqe {

namespace {

// Rotations with |angle| at or below this are identity for our purposes.
constexpr double kAngleTol = 1e-13;
// Sub-blocks below this Frobenius norm are treated as exactly zero/equal.
constexpr double kBlockTol = 1e-12;

void emit_rotation(Circuit& c, RotationAxis axis, int q, double angle) {
    if (axis == RotationAxis::Y) c.ry(q, angle);
    else c.rz(q, angle);
}

// In-place Walsh-Hadamard transform (unnormalised).
void walsh_hadamard(std::vector<double>& v) {
    for (std::size_t h = 1; h < v.size(); h <<= 1)
        for (std::size_t i = 0; i < v.size(); i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j) {
                const double a = v[j], b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
}

bool is_identity_up_to_phase(const CMatrix& u) {
    const cplx p = u(0, 0);
    if (std::abs(std::abs(p) - 1.0) > kBlockTol) return false;
    return (u - p * CMatrix::Identity(u.rows(), u.cols())).norm() <= kBlockTol;
}

// Nearest unitary (polar factor).
CMatrix polish_unitary(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return dec.matrixU() * dec.matrixV().adjoint();
}

struct Csd {
    CMatrix l0, l1, r0, r1;
    Eigen::VectorXd theta; // cos(theta) on the diagonal of the upper-left block
};

// [[U00, U01], [U10, U11]] = (L0 (+) L1) [[C, -S], [S, C]] (R0 (+) R1).
Csd cosine_sine(const CMatrix& u) {
    const Eigen::Index m = u.rows() / 2;
    const CMatrix u00 = u.topLeftCorner(m, m), u01 = u.topRightCorner(m, m);
    const CMatrix u10 = u.bottomLeftCorner(m, m), u11 = u.bottomRightCorner(m, m);

    Eigen::JacobiSVD<CMatrix> dec(u00, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Csd out;
    out.l0 = dec.matrixU();
    out.r0 = dec.matrixV().adjoint();
    Eigen::VectorXd c = dec.singularValues().cwiseMin(1.0);

    // Columns of U10 R0^H are orthogonal with norms sin(theta). Orthonormalise
    // from the largest sine down; tiny columns only need to be orthonormal.
    const CMatrix cols = u10 * out.r0.adjoint();
    out.l1 = CMatrix::Zero(m, m);
    Eigen::VectorXd s(m);
    std::vector<bool> done(static_cast<std::size_t>(m), false);
    const auto project_out = [&](CVector& w) {
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j < m; ++j)
                if (done[static_cast<std::size_t>(j)]) w -= out.l1.col(j) * out.l1.col(j).dot(w);
    };
    for (Eigen::Index i = m - 1; i >= 0; --i) {
        CVector w = cols.col(i);
        project_out(w);
        if (w.norm() < 1e-10) {
            double best = -1.0;
            for (Eigen::Index e = 0; e < m; ++e) {
                CVector cand = CVector::Zero(m);
                cand(e) = 1.0;
                project_out(cand);
                if (cand.norm() > best) {
                    best = cand.norm();
                    w = cand;
                }
            }
        }
        out.l1.col(i) = w / w.norm();
        done[static_cast<std::size_t>(i)] = true;
        s(i) = out.l1.col(i).dot(cols.col(i)).real();
    }

    // Rows of R1 from whichever block carries the larger factor.
    const CMatrix from_u11 = out.l1.adjoint() * u11;
    const CMatrix from_u01 = -(out.l0.adjoint() * u01);
    out.r1 = CMatrix(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (c(i) >= std::abs(s(i))) out.r1.row(i) = from_u11.row(i) / c(i);
        else out.r1.row(i) = from_u01.row(i) / s(i);
    }
    out.r1 = polish_unitary(out.r1);

    out.theta.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) out.theta(i) = std::atan2(s(i), c(i));
    return out;
}

class ShannonDecomposer {
public:
    explicit ShannonDecomposer(Circuit& out) : out_(out) {}

    int max_depth() const noexcept { return max_depth_; }

    void run(const CMatrix& u, std::span<const int> qubits, int level) {
        max_depth_ = std::max(max_depth_, level);
        if (is_identity_up_to_phase(u)) return;
        if (qubits.size() == 1) {
            const auto [a, b, c] = zyz_angles(u);
            if (std::abs(c) > kAngleTol) out_.rz(qubits[0], c);
            if (std::abs(b) > kAngleTol) out_.ry(qubits[0], b);
            if (std::abs(a) > kAngleTol) out_.rz(qubits[0], a);
            return;
        }
        const Eigen::Index m = u.rows() / 2;
        if (u.topRightCorner(m, m).norm() <= kBlockTol && u.bottomLeftCorner(m, m).norm() <= kBlockTol) {
            demultiplex(u.topLeftCorner(m, m), u.bottomRightCorner(m, m), qubits, level);
            return;
        }
        const Csd csd = cosine_sine(u);
        demultiplex(csd.r0, csd.r1, qubits, level);
        std::vector<double> angles(static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < m; ++i) angles[static_cast<std::size_t>(i)] = 2.0 * csd.theta(i);
        append_multiplexed_rotation(out_, RotationAxis::Y, qubits[0], qubits.subspan(1), angles);
        demultiplex(csd.l0, csd.l1, qubits, level);
    }

private:
    // A (+) B = (I (x) V)(D (+) D^H)(I (x) W), selected by qubits[0].
    void demultiplex(const CMatrix& a, const CMatrix& b, std::span<const int> qubits, int level) {
        const auto rest = qubits.subspan(1);
        if ((a - b).norm() <= kBlockTol) {
            run(a, rest, level + 1);
            return;
        }
        const CMatrix x = a * b.adjoint();
        Eigen::ComplexSchur<CMatrix> schur(x);
        const CMatrix v = schur.matrixU();
        const Eigen::Index m = a.rows();
        CVector d(m);
        std::vector<double> angles(static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < m; ++i) {
            const double half_phase = std::arg(schur.matrixT()(i, i)) / 2.0;
            d(i) = std::polar(1.0, half_phase);
            angles[static_cast<std::size_t>(i)] = -2.0 * half_phase;
        }
        const CMatrix w = d.asDiagonal() * (v.adjoint() * b);
        run(w, rest, level + 1);
        append_multiplexed_rotation(out_, RotationAxis::Z, qubits[0], rest, angles);
        run(v, rest, level + 1);
    }

    Circuit& out_;
    int max_depth_ = 0;
};

} // namespace

void append_multiplexed_rotation(Circuit& circuit, RotationAxis axis, int target, std::span<const int> controls,
                                 std::span<const double> angles, bool prune) {
    const std::size_t k = controls.size();
    const std::size_t n = std::size_t{1} << k;
    if (angles.size() != n)
        throw InvalidInput("multiplexed rotation with " + std::to_string(k) + " controls needs " + std::to_string(n) +
                           " angles");
    if (k == 0) {
        if (!prune || std::abs(angles[0]) > kAngleTol) emit_rotation(circuit, axis, target, angles[0]);
        return;
    }

    // theta_c = sum_i (-1)^{popcount(c & gray(i))} phi_i, inverted with a
    // Walsh-Hadamard transform.
    std::vector<double> spectrum(angles.begin(), angles.end());
    walsh_hadamard(spectrum);

    std::size_t pending = 0;
    const auto flush = [&] {
        for (std::size_t b = 0; b < k; ++b)
            if ((pending >> b) & 1U) circuit.cx(controls[k - 1 - b], target);
        pending = 0;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = spectrum[i ^ (i >> 1)] / static_cast<double>(n);
        if (!prune || std::abs(phi) > kAngleTol) {
            flush();
            emit_rotation(circuit, axis, target, phi);
        }
        const std::size_t bit = (i + 1 == n) ? k - 1 : static_cast<std::size_t>(std::countr_zero(i + 1));
        pending ^= std::size_t{1} << bit;
    }
    flush();
}

Circuit prepare_state(std::span<const cplx> amps, bool prune) {
    if (!is_power_of_two(amps.size())) throw InvalidInput("amplitude count must be a power of two");
    const int n = log2_exact(amps.size());
    double norm2 = 0.0;
    bool real = true;
    for (const cplx& a : amps) {
        norm2 += std::norm(a);
        if (std::abs(a.imag()) > 1e-14) real = false;
    }
    if (!std::isfinite(norm2) || std::abs(std::sqrt(norm2) - 1.0) > 1e-10)
        throw InvalidInput("amplitudes must have unit l2 norm (got " + std::to_string(std::sqrt(norm2)) + ")");

    Circuit circuit(n);
    if (n == 0) return circuit;

    // Subtree weights: weights[j][c] = squared norm of entries with prefix c.
    std::vector<std::vector<double>> weights(static_cast<std::size_t>(n) + 1);
    weights[static_cast<std::size_t>(n)].resize(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) weights[static_cast<std::size_t>(n)][i] = std::norm(amps[i]);
    for (int j = n - 1; j >= 0; --j) {
        const auto& below = weights[static_cast<std::size_t>(j) + 1];
        auto& cur = weights[static_cast<std::size_t>(j)];
        cur.resize(below.size() / 2);
        for (std::size_t c = 0; c < cur.size(); ++c) cur[c] = below[2 * c] + below[2 * c + 1];
    }

    std::vector<int> controls;
    for (int j = 0; j < n; ++j) {
        const auto& below = weights[static_cast<std::size_t>(j) + 1];
        std::vector<double> angles(std::size_t{1} << j);
        for (std::size_t c = 0; c < angles.size(); ++c) {
            if (real && j == n - 1)
                angles[c] = 2.0 * std::atan2(amps[2 * c + 1].real(), amps[2 * c].real());
            else
                angles[c] = 2.0 * std::atan2(std::sqrt(below[2 * c + 1]), std::sqrt(below[2 * c]));
        }
        append_multiplexed_rotation(circuit, RotationAxis::Y, j, controls, angles, prune);
        controls.push_back(j);
    }
    if (real) return circuit;

    // Diagonal phase stage, peeled from the last qubit up; the residual phase
    // after qubit 0 is global.
    std::vector<double> phase(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) phase[i] = std::abs(amps[i]) > 0.0 ? std::arg(amps[i]) : 0.0;
    for (int t = n - 1; t >= 0; --t) {
        std::vector<double> diff(phase.size() / 2), mean(phase.size() / 2);
        for (std::size_t c = 0; c < diff.size(); ++c) {
            diff[c] = phase[2 * c + 1] - phase[2 * c];
            mean[c] = 0.5 * (phase[2 * c + 1] + phase[2 * c]);
        }
        controls.pop_back();
        append_multiplexed_rotation(circuit, RotationAxis::Z, t, controls, diff, prune);
        phase = std::move(mean);
    }
    return circuit;
}

std::array<double, 3> zyz_angles(const Eigen::Matrix2cd& u) {
    const cplx det = u.determinant();
    const Eigen::Matrix2cd v = u / std::sqrt(det);
    const double cos_half = std::abs(v(0, 0));
    const double sin_half = std::abs(v(1, 0));
    const double b = 2.0 * std::atan2(sin_half, cos_half);
    double a = 0.0, c = 0.0;
    if (cos_half > 1e-12 && sin_half > 1e-12) {
        const double sum = 2.0 * std::arg(v(1, 1));
        const double diff = 2.0 * std::arg(v(1, 0));
        a = 0.5 * (sum + diff);
        c = 0.5 * (sum - diff);
    } else if (sin_half <= 1e-12) {
        a = 2.0 * std::arg(v(1, 1));
    } else {
        a = 2.0 * std::arg(v(1, 0));
    }
    return {a, b, c};
}

Circuit decompose_unitary(const CMatrix& u, SynthesisReport* report) {
    if (u.rows() != u.cols() || !is_power_of_two(static_cast<std::size_t>(u.rows())) || u.rows() < 2)
        throw InvalidInput("unitary must be square with a power-of-two dimension >= 2");
    const int arity = log2_exact(static_cast<std::size_t>(u.rows()));
    if (arity > kMaxSynthesisArity)
        throw ResourceError("unitary synthesis supports at most " + std::to_string(kMaxSynthesisArity) +
                            " qubits, got " + std::to_string(arity));
    if (unitarity_residual(u) > 1e-10) throw InvalidInput("matrix is not unitary within 1e-10");

    Circuit circuit(arity);
    std::vector<int> qubits(static_cast<std::size_t>(arity));
    for (int q = 0; q < arity; ++q) qubits[static_cast<std::size_t>(q)] = q;
    ShannonDecomposer qsd(circuit);
    qsd.run(u, qubits, 0);

    if (report) {
        report->arity = arity;
        report->counts = counts(circuit);
        report->residual = phase_aligned_residual(circuit_unitary(circuit), u);
        report->recursion_depth = qsd.max_depth();
    }
    return circuit;
}

} // namespace tnqe
