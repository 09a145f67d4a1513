#include "tnqe/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "tnqe/error.hpp"

namespace tnqe {

namespace {

using RowMajorC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

CMatrix core_slice(const QttCore& core, int p) {
    CMatrix m(static_cast<Eigen::Index>(core.left), static_cast<Eigen::Index>(core.right));
    for (std::size_t a = 0; a < core.left; ++a)
        for (std::size_t b = 0; b < core.right; ++b)
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = core.at(a, p / 2, p % 2, b);
    return m;
}

// Adjoint (d/dRe + i d/dIm) of every core entry given the adjoint of the
// contracted values, which include cores.scale.
std::vector<std::vector<cplx>> core_adjoints(const QttCores& cores, std::span<const cplx> gx) {
    const std::size_t levels = cores.cores.size();
    // left[k]: prefix(p_1..p_k) x r_k, right[k]: r_{k-1} x suffix(p_k..p_L)
    std::vector<CMatrix> left(levels + 1), right(levels + 2);
    left[0] = CMatrix::Ones(1, 1);
    for (std::size_t k = 1; k <= levels; ++k) {
        const QttCore& core = cores.cores[k - 1];
        const CMatrix& prev = left[k - 1];
        CMatrix next(prev.rows() * 4, static_cast<Eigen::Index>(core.right));
        for (int p = 0; p < 4; ++p) {
            const CMatrix block = prev * core_slice(core, p);
            for (Eigen::Index r = 0; r < prev.rows(); ++r) next.row(r * 4 + p) = block.row(r);
        }
        left[k] = std::move(next);
    }
    right[levels + 1] = CMatrix::Ones(1, 1);
    for (std::size_t k = levels; k >= 1; --k) {
        const QttCore& core = cores.cores[k - 1];
        const CMatrix& after = right[k + 1];
        const Eigen::Index s = after.cols();
        CMatrix next(static_cast<Eigen::Index>(core.left), 4 * s);
        for (int p = 0; p < 4; ++p) next.middleCols(p * s, s) = core_slice(core, p) * after;
        right[k] = std::move(next);
    }

    std::vector<std::vector<cplx>> out(levels);
    for (std::size_t k = 1; k <= levels; ++k) {
        const QttCore& core = cores.cores[k - 1];
        const CMatrix& l = left[k - 1];
        const CMatrix& r = right[k + 1];
        const Eigen::Index s = r.cols();
        const Eigen::Map<const RowMajorC> g(gx.data(), l.rows(), 4 * s);
        out[k - 1].assign(core.data.size(), cplx{0.0, 0.0});
        for (int p = 0; p < 4; ++p) {
            const CMatrix ga = cores.scale * (l.adjoint() * g.middleCols(p * s, s) * r.adjoint());
            for (std::size_t a = 0; a < core.left; ++a)
                for (std::size_t b = 0; b < core.right; ++b)
                    out[k - 1][((a * 2 + p / 2) * 2 + p % 2) * core.right + b] =
                        ga(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
    }
    return out;
}

void check_pair(std::size_t recon, std::span<const double> target) {
    if (recon != target.size())
        throw InvalidInput("reconstruction has " + std::to_string(recon) + " entries, target " +
                           std::to_string(target.size()));
}

double target_mass(std::span<const double> target) {
    double mass = 0.0;
    for (double v : target) {
        if (!(v >= 0.0)) throw InvalidInput("KL target entries must be finite and non-negative");
        mass += v;
    }
    if (!(mass > 0.0)) throw InvalidInput("KL target is all zero");
    return mass;
}

struct KlTerms {
    double value = 0.0;
    std::vector<cplx> adjoint;
};

KlTerms kl_with_adjoint(std::span<const cplx> x, std::span<const double> target, double mass, bool want_adjoint) {
    double z = 0.0;
    for (const cplx& v : x) z += std::norm(v);
    KlTerms out;
    std::vector<double> g(x.size());
    double mean_g = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double py = target[i] / mass;
        const double px = z > 0.0 ? std::norm(x[i]) / z : 0.0;
        out.value += py * (std::log(py + kKlLogFloor) - std::log(px + kKlLogFloor));
        g[i] = -py / (px + kKlLogFloor);
        mean_g += g[i] * px;
    }
    if (want_adjoint) {
        out.adjoint.assign(x.size(), cplx{0.0, 0.0});
        if (z > 0.0)
            for (std::size_t i = 0; i < x.size(); ++i) out.adjoint[i] = 2.0 * x[i] * (g[i] - mean_g) / z;
    }
    return out;
}

// Gate list of a block fragment with the flat parameter index each rotation
// reads (-1 for CNOTs).
struct TaggedGate {
    Gate gate;
    int param = -1;
};

std::vector<TaggedGate> tagged_fragment(const BlockParams& params) {
    std::vector<TaggedGate> out;
    const auto pattern = entangler_pattern(params.bond_qubits());
    const int n = params.arity();
    const int layers = params.layers();
    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q < n; ++q) {
            out.push_back({RyGate{q, params.alpha(l, q)}, q * layers + l});
            out.push_back({RzGate{q, params.beta(l, q)}, (n + q) * layers + l});
        }
        for (const auto& g : pattern) out.push_back({g, -1});
    }
    return out;
}

Gate inverse(const Gate& g) {
    if (const auto* r = std::get_if<RyGate>(&g)) return RyGate{r->qubit, -r->angle};
    if (const auto* r = std::get_if<RzGate>(&g)) return RzGate{r->qubit, -r->angle};
    return g;
}

void apply_columns(const Gate& g, CMatrix& m, int qubits) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        apply(g, std::span<cplx>(m.col(c).data(), static_cast<std::size_t>(m.rows())), qubits);
}

// Re sum conj(lambda) * (-i/2 P) s for the rotation generator P on `qubit`.
double generator_overlap(const CMatrix& lambda, const CMatrix& s, int qubit, int qubits, bool is_y) {
    const std::size_t mask = std::size_t{1} << (qubits - 1 - qubit);
    double acc = 0.0;
    for (Eigen::Index c = 0; c < s.cols(); ++c)
        for (std::size_t i = 0; i < static_cast<std::size_t>(s.rows()); ++i) {
            if (i & mask) continue;
            const auto i0 = static_cast<Eigen::Index>(i), i1 = static_cast<Eigen::Index>(i | mask);
            cplx d0, d1;
            if (is_y) {
                d0 = -0.5 * s(i1, c);
                d1 = 0.5 * s(i0, c);
            } else {
                d0 = cplx{0.0, -0.5} * s(i0, c);
                d1 = cplx{0.0, 0.5} * s(i1, c);
            }
            acc += (std::conj(lambda(i0, c)) * d0 + std::conj(lambda(i1, c)) * d1).real();
        }
    return acc;
}

std::vector<double> quantized_pixels(const Image& img) { return quantize_image(img).values; }

} // namespace

double kl_loss(std::span<const cplx> recon, std::span<const double> target) {
    check_pair(recon.size(), target);
    return kl_with_adjoint(recon, target, target_mass(target), false).value;
}

double kl_loss(const Image& recon, const Image& target) {
    if (recon.size() != target.size()) throw InvalidInput("image sizes differ");
    std::vector<cplx> x(recon.pixels().begin(), recon.pixels().end());
    return kl_loss(x, target.pixels());
}

double mse_loss(std::span<const cplx> recon, std::span<const double> target) {
    check_pair(recon.size(), target);
    if (recon.empty()) throw InvalidInput("empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < recon.size(); ++i) acc += std::norm(recon[i] - target[i]);
    return acc / static_cast<double>(recon.size());
}

double mse_loss(const Image& recon, const Image& target) {
    if (recon.size() != target.size()) throw InvalidInput("image sizes differ");
    std::vector<cplx> x(recon.pixels().begin(), recon.pixels().end());
    return mse_loss(x, target.pixels());
}

double finite_difference_partial(const ScalarObjective& f, std::span<const double> x, std::size_t i, double h) {
    std::vector<double> probe(x.begin(), x.end());
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    return (up - down) / (2.0 * h);
}

std::vector<double> finite_difference_gradient(const ScalarObjective& f, std::span<const double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = finite_difference_partial(f, x, i, h);
    return g;
}

std::vector<double> gradient(const ScalarObjective& f, std::span<const double> x) {
    if (!std::isfinite(f(x))) throw InvalidInput("objective is not finite at the evaluation point");
    return finite_difference_gradient(f, x);
}

// --- block-unitary KL objective

UnitaryKlObjective::UnitaryKlObjective(const Image& target, int bond_qubits, int layers)
    : target_(quantized_pixels(target)), image_size_(target.size()), levels_(target.levels()),
      bond_qubits_(bond_qubits), layers_(layers) {
    mass_ = target_mass(target_);
    BlockParams probe(bond_qubits, layers); // validates counts
    if (levels_ < 1) throw InvalidInput("target must be at least 2x2");
}

std::size_t UnitaryKlObjective::parameter_count() const noexcept {
    return static_cast<std::size_t>(levels_) * 2 * static_cast<std::size_t>(bond_qubits_ + 2) *
           static_cast<std::size_t>(layers_);
}

std::vector<BlockParams> UnitaryKlObjective::unpack(std::span<const double> params) const {
    if (params.size() != parameter_count())
        throw InvalidInput("expected " + std::to_string(parameter_count()) + " parameters, got " +
                           std::to_string(params.size()));
    std::vector<BlockParams> blocks;
    std::size_t offset = 0;
    for (int k = 0; k < levels_; ++k) {
        BlockParams b(bond_qubits_, layers_);
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), b.parameter_count(), b.angles().begin());
        offset += b.parameter_count();
        blocks.push_back(std::move(b));
    }
    return blocks;
}

std::vector<double> UnitaryKlObjective::pack(std::span<const BlockParams> blocks) const {
    if (blocks.size() != static_cast<std::size_t>(levels_)) throw InvalidInput("need one block per level");
    std::vector<double> out;
    for (const auto& b : blocks) {
        if (b.bond_qubits() != bond_qubits_ || b.layers() != layers_) throw InvalidInput("block shape mismatch");
        out.insert(out.end(), b.angles().begin(), b.angles().end());
    }
    return out;
}

double UnitaryKlObjective::value(std::span<const double> params) const {
    const auto blocks = unpack(params);
    const auto x = contract_values(unitary_cores(blocks));
    return kl_with_adjoint(x, target_, mass_, false).value;
}

LossValue UnitaryKlObjective::evaluate(std::span<const double> params) const {
    const auto blocks = unpack(params);
    const int n = bond_qubits_ + 2;
    const auto dim = Eigen::Index{1} << n;
    const std::size_t bond = std::size_t{1} << bond_qubits_;

    // Forward: only the leading r_in columns of each block unitary matter.
    std::vector<std::vector<TaggedGate>> gates;
    std::vector<CMatrix> columns;
    QttCores cores;
    for (int k = 0; k < levels_; ++k) {
        const std::size_t r_in = k == 0 ? 1 : bond;
        const std::size_t r_out = k + 1 == levels_ ? 1 : bond;
        gates.push_back(tagged_fragment(blocks[static_cast<std::size_t>(k)]));
        CMatrix s = CMatrix::Identity(dim, static_cast<Eigen::Index>(r_in));
        for (const auto& tg : gates.back()) apply_columns(tg.gate, s, n);
        QttCore core(r_in, r_out);
        for (std::size_t a = 0; a < r_in; ++a)
            for (int p = 0; p < 4; ++p)
                for (std::size_t b = 0; b < r_out; ++b)
                    core.at(a, p / 2, p % 2, b) =
                        s(static_cast<Eigen::Index>(static_cast<std::size_t>(p) * bond + b), static_cast<Eigen::Index>(a));
        cores.cores.push_back(std::move(core));
        columns.push_back(std::move(s));
    }

    const auto x = contract_values(cores);
    KlTerms kl = kl_with_adjoint(x, target_, mass_, true);
    const auto core_grads = core_adjoints(cores, kl.adjoint);

    LossValue out{kl.value, std::vector<double>(parameter_count(), 0.0)};
    std::size_t offset = 0;
    for (int k = 0; k < levels_; ++k) {
        const QttCore& core = cores.cores[static_cast<std::size_t>(k)];
        CMatrix& s = columns[static_cast<std::size_t>(k)];
        CMatrix lambda = CMatrix::Zero(dim, s.cols());
        for (std::size_t a = 0; a < core.left; ++a)
            for (int p = 0; p < 4; ++p)
                for (std::size_t b = 0; b < core.right; ++b)
                    lambda(static_cast<Eigen::Index>(static_cast<std::size_t>(p) * bond + b), static_cast<Eigen::Index>(a)) =
                        core_grads[static_cast<std::size_t>(k)][((a * 2 + p / 2) * 2 + p % 2) * core.right + b];
        const auto& tagged = gates[static_cast<std::size_t>(k)];
        for (auto it = tagged.rbegin(); it != tagged.rend(); ++it) {
            if (it->param >= 0) {
                const bool is_y = std::holds_alternative<RyGate>(it->gate);
                const int q = gate_qubits(it->gate).front();
                out.gradient[offset + static_cast<std::size_t>(it->param)] = generator_overlap(lambda, s, q, n, is_y);
            }
            const Gate inv = inverse(it->gate);
            apply_columns(inv, s, n);
            apply_columns(inv, lambda, n);
        }
        offset += blocks[static_cast<std::size_t>(k)].parameter_count();
    }
    return out;
}

Image UnitaryKlObjective::reconstruct(std::span<const double> params) const {
    const auto x = contract_values(unitary_cores(unpack(params)));
    double z = 0.0;
    for (const cplx& v : x) z += std::norm(v);
    QuantizedTensor t{levels_, std::vector<double>(x.size(), 0.0)};
    if (z > 0.0)
        for (std::size_t i = 0; i < x.size(); ++i) t.values[i] = mass_ * std::norm(x[i]) / z;
    return dequantize(t);
}

// --- classical QTT MSE objective

QttMseObjective::QttMseObjective(const Image& target, const QttCores& shape) : target_(quantized_pixels(target)) {
    shape.validate();
    if (shape.levels() != target.levels()) throw InvalidInput("core count does not match the image levels");
    for (const auto& c : shape.cores) {
        bonds_.emplace_back(c.left, c.right);
        parameter_count_ += c.data.size();
    }
}

std::vector<double> QttMseObjective::pack(const QttCores& cores) const {
    if (cores.cores.size() != bonds_.size()) throw InvalidInput("core count mismatch");
    std::vector<double> out;
    out.reserve(parameter_count_);
    for (std::size_t k = 0; k < cores.cores.size(); ++k) {
        const auto& c = cores.cores[k];
        if (c.left != bonds_[k].first || c.right != bonds_[k].second) throw InvalidInput("core shape mismatch");
        const double factor = k == 0 ? cores.scale : 1.0;
        for (const cplx& v : c.data) out.push_back(factor * v.real());
    }
    return out;
}

QttCores QttMseObjective::unpack(std::span<const double> params) const {
    if (params.size() != parameter_count_)
        throw InvalidInput("expected " + std::to_string(parameter_count_) + " parameters, got " +
                           std::to_string(params.size()));
    QttCores out;
    std::size_t offset = 0;
    for (const auto& [l, r] : bonds_) {
        QttCore c(l, r);
        for (auto& v : c.data) v = params[offset++];
        out.cores.push_back(std::move(c));
    }
    return out;
}

double QttMseObjective::value(std::span<const double> params) const {
    return mse_loss(contract_values(unpack(params)), target_);
}

LossValue QttMseObjective::evaluate(std::span<const double> params) const {
    const QttCores cores = unpack(params);
    const auto x = contract_values(cores);
    const double inv_n = 1.0 / static_cast<double>(x.size());
    std::vector<cplx> gx(x.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i].real() - target_[i];
        loss += d * d;
        gx[i] = 2.0 * d * inv_n;
    }
    LossValue out{loss * inv_n, {}};
    out.gradient.reserve(parameter_count_);
    for (const auto& g : core_adjoints(cores, gx))
        for (const cplx& v : g) out.gradient.push_back(v.real());
    return out;
}

// --- optimisers

void OptConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidInput("learning rate must be > 0");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) throw InvalidInput("weight decay must be >= 0");
    if (epochs < 1) throw InvalidInput("epochs must be >= 1");
}

OptConfig OptConfig::qtt_defaults() { return {}; }

OptConfig OptConfig::unitary_defaults() {
    OptConfig c;
    c.optimizer = OptimizerKind::AdamW;
    c.learning_rate = 0.03;
    c.weight_decay = 1e-4;
    c.epochs = 1000;
    c.schedule = ScheduleKind::OneCycle;
    c.loss = LossKind::Kl;
    return c;
}

double one_cycle_rate(std::size_t step, std::size_t total_steps, double max_rate) {
    const double floor = max_rate / 25.0;
    if (total_steps <= 1) return max_rate;
    const auto warm = static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(total_steps)));
    if (step < warm) return floor + (max_rate - floor) * static_cast<double>(step) / static_cast<double>(warm);
    const double span = static_cast<double>(std::max<std::size_t>(1, total_steps - 1 - warm));
    const double q = std::min(1.0, static_cast<double>(step - warm) / span);
    return floor + (max_rate - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * q));
}

AdamStepper::AdamStepper(std::size_t size, OptimizerKind kind, double weight_decay)
    : kind_(kind), weight_decay_(weight_decay), m_(size, 0.0), v_(size, 0.0) {}

void AdamStepper::step(std::span<double> params, std::span<const double> grad, double rate) {
    if (params.size() != m_.size() || grad.size() != m_.size()) throw InvalidInput("optimizer size mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double g = grad[i];
        if (kind_ == OptimizerKind::Adam) g += weight_decay_ * params[i];
        else params[i] -= rate * weight_decay_ * params[i];
        m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g;
        v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g * g;
        params[i] -= rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEpsilon);
    }
}

namespace {

template <class Objective>
std::vector<double> descend(const Objective& obj, std::vector<double> x, const OptConfig& cfg,
                            std::vector<double>& losses, double& best) {
    AdamStepper stepper(x.size(), cfg.optimizer, cfg.weight_decay);
    std::vector<double> best_x = x;
    best = std::numeric_limits<double>::infinity();
    const auto total = static_cast<std::size_t>(cfg.epochs);
    for (std::size_t step = 0; step < total; ++step) {
        const LossValue lv = obj.evaluate(x);
        if (!std::isfinite(lv.value)) throw InvalidInput("loss diverged at epoch " + std::to_string(step));
        losses.push_back(lv.value);
        if (lv.value < best) {
            best = lv.value;
            best_x = x;
        }
        const double rate = cfg.schedule == ScheduleKind::OneCycle ? one_cycle_rate(step, total, cfg.learning_rate)
                                                                   : cfg.learning_rate;
        stepper.step(x, lv.gradient, rate);
    }
    const double last = obj.value(x);
    losses.push_back(last);
    if (last < best) {
        best = last;
        best_x = x;
    }
    return best_x;
}

} // namespace

QttFit fit_qtt(const Image& img, std::size_t rank, const OptConfig& cfg) {
    cfg.validate();
    if (cfg.loss != LossKind::Mse) throw InvalidInput("QTT refinement uses the MSE loss");
    const TtSvdResult init = tt_svd(quantize_image(img), rank);
    const QttMseObjective obj(img, init.cores);
    QttFit fit;
    const std::vector<double> x0 = obj.pack(init.cores);
    fit.initial_loss = obj.value(x0);
    fit.cores = obj.unpack(descend(obj, x0, cfg, fit.losses, fit.best_loss));
    return fit;
}

UnitaryFit fit_unitary(const Image& img, std::size_t rank, int layers, const OptConfig& cfg) {
    cfg.validate();
    if (cfg.loss != LossKind::Kl) throw InvalidInput("block-unitary training uses the KL loss");
    if (rank < 1) throw InvalidInput("rank must be >= 1");
    const UnitaryKlObjective obj(img, bond_qubits_for_rank(rank), layers);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> init(-0.1, 0.1);
    std::vector<double> x0(obj.parameter_count());
    for (double& v : x0) v = init(rng);

    UnitaryFit fit;
    fit.initial_loss = obj.value(x0);
    fit.blocks = obj.unpack(descend(obj, x0, cfg, fit.losses, fit.best_loss));
    return fit;
}

} // namespace tnqe
