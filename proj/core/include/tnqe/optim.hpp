#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tnqe/encoders.hpp"
#include "tnqe/linalg.hpp"
#include "tnqe/tensor.hpp"

namespace tnqe {

// Additive floor inside both logarithms of the KL loss.
inline constexpr double kKlLogFloor = 1e-12;

// KL(p_Y || p_X) with p_X = |X|^2 / sum |X|^2 and p_Y = Y / sum Y. Both
// spans must use the same element order. Throws InvalidInput for an all-zero
// target, a negative target entry, or a size mismatch.
double kl_loss(std::span<const cplx> recon, std::span<const double> target);
double kl_loss(const Image& recon, const Image& target);

// Mean of |X - Y|^2.
double mse_loss(std::span<const cplx> recon, std::span<const double> target);
double mse_loss(const Image& recon, const Image& target);

struct LossValue {
    double value = 0.0;
    std::vector<double> gradient;
};

using ScalarObjective = std::function<double(std::span<const double>)>;

// Central differences with step h per coordinate.
std::vector<double> finite_difference_gradient(const ScalarObjective& f, std::span<const double> x,
                                               double h = 1e-5);
double finite_difference_partial(const ScalarObjective& f, std::span<const double> x, std::size_t i,
                                 double h = 1e-5);

// Gradient of an objective by central differences; throws InvalidInput when
// f(x) is not finite.
std::vector<double> gradient(const ScalarObjective& f, std::span<const double> x);

// KL loss of the QTT contraction realised by a chain of parameterised blocks
// (extract_core of each block unitary, then contract) against a target image.
// Parameters are the concatenated BlockParams::angles of blocks 1..L.
class UnitaryKlObjective {
public:
    UnitaryKlObjective(const Image& target, int bond_qubits, int layers);

    std::size_t parameter_count() const noexcept;
    int levels() const noexcept { return levels_; }
    int bond_qubits() const noexcept { return bond_qubits_; }
    int layers() const noexcept { return layers_; }

    std::vector<BlockParams> unpack(std::span<const double> params) const;
    std::vector<double> pack(std::span<const BlockParams> blocks) const;

    double value(std::span<const double> params) const;
    // Exact gradient by reverse-mode sweeps through contraction and gates.
    LossValue evaluate(std::span<const double> params) const;

    // Classical reconstruction: pixel sum of target times the Born
    // distribution of the contraction.
    Image reconstruct(std::span<const double> params) const;

private:
    std::vector<double> target_; // quantized order
    double mass_ = 0.0;
    std::size_t image_size_ = 0;
    int levels_ = 0;
    int bond_qubits_ = 0;
    int layers_ = 0;
};

// MSE between the contraction of real QTT cores and a target. Parameters are
// the real parts of every core entry, cores in order, entries row-major.
class QttMseObjective {
public:
    QttMseObjective(const Image& target, const QttCores& shape);

    std::size_t parameter_count() const noexcept { return parameter_count_; }
    std::vector<double> pack(const QttCores& cores) const;
    QttCores unpack(std::span<const double> params) const;

    double value(std::span<const double> params) const;
    LossValue evaluate(std::span<const double> params) const;

private:
    std::vector<double> target_;
    std::vector<std::pair<std::size_t, std::size_t>> bonds_;
    std::size_t parameter_count_ = 0;
};

enum class OptimizerKind { Adam, AdamW };
enum class ScheduleKind { Constant, OneCycle };
enum class LossKind { Mse, Kl };

struct OptConfig {
    OptimizerKind optimizer = OptimizerKind::Adam;
    double learning_rate = 0.01; // constant rate, or the peak of one-cycle
    double weight_decay = 0.0;
    int epochs = 2000;
    ScheduleKind schedule = ScheduleKind::Constant;
    LossKind loss = LossKind::Mse;
    std::uint64_t seed = 0;

    void validate() const;

    // Classical QTT refinement: Adam, 0.01, 2000 epochs, MSE.
    static OptConfig qtt_defaults();
    // Block-unitary training: AdamW, one-cycle to 0.03, decay 1e-4,
    // 1000 epochs, KL.
    static OptConfig unitary_defaults();
};

// Linear warm-up from max_rate/25 to max_rate over the first 30% of steps,
// then cosine decay back to max_rate/25.
double one_cycle_rate(std::size_t step, std::size_t total_steps, double max_rate);

// Adam (coupled L2 decay) or AdamW (decoupled decay), beta1 0.9,
// beta2 0.999, eps 1e-8.
class AdamStepper {
public:
    AdamStepper(std::size_t size, OptimizerKind kind, double weight_decay = 0.0);

    void step(std::span<double> params, std::span<const double> grad, double rate);

    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEpsilon = 1e-8;

private:
    OptimizerKind kind_;
    double weight_decay_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::size_t t_ = 0;
};

struct QttFit {
    QttCores cores;            // best-loss cores seen
    std::vector<double> losses; // loss before each step, then the final loss
    double initial_loss = 0.0;
    double best_loss = 0.0;
};

// TT-SVD initialisation refined by gradient steps on MSE; never returns
// anything worse than the initialisation.
QttFit fit_qtt(const Image& img, std::size_t rank, const OptConfig& cfg = OptConfig::qtt_defaults());

struct UnitaryFit {
    std::vector<BlockParams> blocks; // best-loss parameters seen
    std::vector<double> losses;
    double initial_loss = 0.0;
    double best_loss = 0.0;
};

// Angles start uniform in [-0.1, 0.1] from cfg.seed.
UnitaryFit fit_unitary(const Image& img, std::size_t rank, int layers,
                       const OptConfig& cfg = OptConfig::unitary_defaults());

} // namespace tnqe
