#include "tnqe/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "tnqe/error.hpp"

namespace tnqe {

namespace {

constexpr std::size_t kParallelThreshold = std::size_t{1} << 14;

// Spreads [0, count) over up to `threads` workers. Every index is handled by
// exactly one worker, so results do not depend on the split.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count < kParallelThreshold) {
        fn(std::size_t{0}, count);
        return;
    }
    const auto workers = static_cast<std::size_t>(threads);
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::jthread> pool;
    for (std::size_t begin = chunk; begin < count; begin += chunk)
        pool.emplace_back([&fn, begin, end = std::min(count, begin + chunk)] { fn(begin, end); });
    fn(std::size_t{0}, std::min(count, chunk));
}

// Inserts a zero bit at each position of `bits` (ascending).
inline std::size_t insert_zero_bits(std::size_t t, std::span<const int> bits) {
    for (int b : bits) {
        const std::size_t low = t & ((std::size_t{1} << b) - 1);
        t = ((t >> b) << (b + 1)) | low;
    }
    return t;
}

struct GateValidator {
    int n;

    void check_qubit(int q) const {
        if (q < 0 || q >= n)
            throw StructuralError("qubit " + std::to_string(q) + " out of range for " + std::to_string(n) + " qubits");
    }
    void operator()(const RyGate& g) const {
        check_qubit(g.qubit);
        if (!std::isfinite(g.angle)) throw StructuralError("non-finite RY angle");
    }
    void operator()(const RzGate& g) const {
        check_qubit(g.qubit);
        if (!std::isfinite(g.angle)) throw StructuralError("non-finite RZ angle");
    }
    void operator()(const CnotGate& g) const {
        check_qubit(g.control);
        check_qubit(g.target);
        if (g.control == g.target) throw StructuralError("CNOT control equals target");
    }
    void operator()(const OpaqueGate& g) const {
        if (g.qubits.empty()) throw StructuralError("opaque gate acts on no qubits");
        for (int q : g.qubits) check_qubit(q);
        auto sorted = g.qubits;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw StructuralError("opaque gate repeats a qubit");
        const auto dim = Eigen::Index{1} << g.qubits.size();
        if (g.matrix.rows() != dim || g.matrix.cols() != dim)
            throw StructuralError("opaque gate matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
        if (unitarity_residual(g.matrix) > 1e-10) throw StructuralError("opaque gate matrix is not unitary");
    }
};

void apply_single(std::span<cplx> amps, int n, int q, const Eigen::Matrix2cd& m, int threads) {
    const int bit = n - 1 - q;
    const std::size_t stride = std::size_t{1} << bit;
    const int bits[] = {bit};
    const cplx m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
    parallel_for(amps.size() / 2, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t i = insert_zero_bits(t, bits);
            const cplx a0 = amps[i];
            const cplx a1 = amps[i + stride];
            amps[i] = m00 * a0 + m01 * a1;
            amps[i + stride] = m10 * a0 + m11 * a1;
        }
    });
}

void apply_ry(std::span<cplx> amps, int n, int q, double angle, int threads) {
    const int bit = n - 1 - q;
    const std::size_t stride = std::size_t{1} << bit;
    const int bits[] = {bit};
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    parallel_for(amps.size() / 2, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t i = insert_zero_bits(t, bits);
            const cplx a0 = amps[i];
            const cplx a1 = amps[i + stride];
            amps[i] = c * a0 - s * a1;
            amps[i + stride] = s * a0 + c * a1;
        }
    });
}

void apply_rz(std::span<cplx> amps, int n, int q, double angle, int threads) {
    const int bit = n - 1 - q;
    const std::size_t stride = std::size_t{1} << bit;
    const int bits[] = {bit};
    const cplx lo = std::polar(1.0, -angle / 2), hi = std::polar(1.0, angle / 2);
    parallel_for(amps.size() / 2, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t i = insert_zero_bits(t, bits);
            amps[i] *= lo;
            amps[i + stride] *= hi;
        }
    });
}

void apply_cnot(std::span<cplx> amps, int n, int control, int target, int threads) {
    const int cbit = n - 1 - control;
    const int tbit = n - 1 - target;
    const int bits[] = {std::min(cbit, tbit), std::max(cbit, tbit)};
    const std::size_t cmask = std::size_t{1} << cbit;
    const std::size_t tmask = std::size_t{1} << tbit;
    parallel_for(amps.size() / 4, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t i = insert_zero_bits(t, bits) | cmask;
            std::swap(amps[i], amps[i | tmask]);
        }
    });
}

void apply_opaque(std::span<cplx> amps, int n, const OpaqueGate& g, int threads) {
    const auto k = static_cast<int>(g.qubits.size());
    const std::size_t dim = std::size_t{1} << k;
    std::vector<std::size_t> offsets(dim, 0);
    for (std::size_t l = 0; l < dim; ++l)
        for (int j = 0; j < k; ++j)
            if ((l >> (k - 1 - j)) & 1U) offsets[l] |= std::size_t{1} << (n - 1 - g.qubits[static_cast<std::size_t>(j)]);
    std::vector<int> bits;
    for (int q : g.qubits) bits.push_back(n - 1 - q);
    std::sort(bits.begin(), bits.end());

    parallel_for(amps.size() / dim, threads, [&](std::size_t begin, std::size_t end) {
        CVector local(static_cast<Eigen::Index>(dim));
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t base = insert_zero_bits(t, bits);
            for (std::size_t l = 0; l < dim; ++l) local(static_cast<Eigen::Index>(l)) = amps[base + offsets[l]];
            const CVector out = g.matrix * local;
            for (std::size_t l = 0; l < dim; ++l) amps[base + offsets[l]] = out(static_cast<Eigen::Index>(l));
        }
    });
}

} // namespace

Eigen::Matrix2cd ry_matrix(double angle) {
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    Eigen::Matrix2cd m;
    m << c, -s, s, c;
    return m;
}

Eigen::Matrix2cd rz_matrix(double angle) {
    Eigen::Matrix2cd m;
    m << std::polar(1.0, -angle / 2), 0.0, 0.0, std::polar(1.0, angle / 2);
    return m;
}

std::vector<int> gate_qubits(const Gate& g) {
    struct Visitor {
        std::vector<int> operator()(const RyGate& x) const { return {x.qubit}; }
        std::vector<int> operator()(const RzGate& x) const { return {x.qubit}; }
        std::vector<int> operator()(const CnotGate& x) const { return {x.control, x.target}; }
        std::vector<int> operator()(const OpaqueGate& x) const { return x.qubits; }
    };
    return std::visit(Visitor{}, g);
}

Circuit::Circuit(int qubits) : qubits_(qubits) {
    if (qubits < 0) throw StructuralError("negative qubit count");
}

void Circuit::add(Gate g) {
    std::visit(GateValidator{qubits_}, g);
    gates_.push_back(std::move(g));
}

void Circuit::append(const Circuit& other, std::span<const int> qubit_map) {
    if (qubit_map.size() != static_cast<std::size_t>(other.qubits()))
        throw StructuralError("qubit map size does not match the appended circuit");
    const auto map = [&](int q) { return qubit_map[static_cast<std::size_t>(q)]; };
    for (const Gate& g : other.gates()) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, RyGate>) add(RyGate{map(x.qubit), x.angle});
                else if constexpr (std::is_same_v<T, RzGate>) add(RzGate{map(x.qubit), x.angle});
                else if constexpr (std::is_same_v<T, CnotGate>) add(CnotGate{map(x.control), map(x.target)});
                else {
                    OpaqueGate mapped{{}, x.matrix};
                    for (int q : x.qubits) mapped.qubits.push_back(map(q));
                    add(std::move(mapped));
                }
            },
            g);
    }
}

void Circuit::append(const Circuit& other) {
    std::vector<int> identity(static_cast<std::size_t>(other.qubits()));
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
    append(other, identity);
}

GateCounts counts(const Circuit& c) {
    GateCounts out;
    std::vector<bool> last_single(static_cast<std::size_t>(c.qubits()), false);
    for (const Gate& g : c.gates()) {
        const auto qs = gate_qubits(g);
        if (std::holds_alternative<RyGate>(g) || std::holds_alternative<RzGate>(g)) {
            ++out.single_qubit;
            const auto q = static_cast<std::size_t>(qs.front());
            if (!last_single[q]) ++out.fused_single_qubit;
            last_single[q] = true;
            continue;
        }
        if (std::holds_alternative<CnotGate>(g)) ++out.cnot;
        else ++out.opaque;
        for (int q : qs) last_single[static_cast<std::size_t>(q)] = false;
    }
    out.total = out.single_qubit + out.cnot + out.opaque;
    out.fused_total = out.fused_single_qubit + out.cnot + out.opaque;
    return out;
}

std::size_t depth(const Circuit& c, DepthMode mode) {
    const auto n = static_cast<std::size_t>(c.qubits());
    std::vector<std::size_t> level(n, 0);
    std::vector<bool> last_single(n, false);
    std::size_t total = 0;
    for (const Gate& g : c.gates()) {
        const auto qs = gate_qubits(g);
        const bool single = std::holds_alternative<RyGate>(g) || std::holds_alternative<RzGate>(g);
        if (single && mode == DepthMode::FusedSingleQubit && last_single[static_cast<std::size_t>(qs.front())])
            continue;
        std::size_t layer = 0;
        for (int q : qs) layer = std::max(layer, level[static_cast<std::size_t>(q)]);
        ++layer;
        for (int q : qs) {
            level[static_cast<std::size_t>(q)] = layer;
            last_single[static_cast<std::size_t>(q)] = single;
        }
        total = std::max(total, layer);
    }
    return total;
}

Circuit tensor_with(const Circuit& a, const Circuit& b) {
    Circuit out(a.qubits() + b.qubits());
    out.append(a);
    std::vector<int> shifted(static_cast<std::size_t>(b.qubits()));
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = a.qubits() + static_cast<int>(i);
    out.append(b, shifted);
    return out;
}

StateVector::StateVector(int qubits) : qubits_(qubits) {
    if (qubits < 0 || qubits > 40) throw ResourceError("cannot allocate a state on " + std::to_string(qubits) + " qubits");
    amps_.assign(std::size_t{1} << qubits, cplx{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(int qubits, std::vector<cplx> amplitudes) : qubits_(qubits), amps_(std::move(amplitudes)) {
    if (qubits < 0 || qubits > 40 || amps_.size() != (std::size_t{1} << qubits))
        throw StructuralError("state vector length does not match 2^" + std::to_string(qubits));
}

double StateVector::norm() const {
    double acc = 0.0;
    for (const cplx& a : amps_) acc += std::norm(a);
    return std::sqrt(acc);
}

int default_thread_budget() {
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (const char* env = std::getenv("TNQE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) threads = std::min(threads, cap);
    }
    return threads;
}

void apply(const Gate& g, std::span<cplx> amps, int qubits, int threads) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, RyGate>) apply_ry(amps, qubits, x.qubit, x.angle, threads);
            else if constexpr (std::is_same_v<T, RzGate>) apply_rz(amps, qubits, x.qubit, x.angle, threads);
            else if constexpr (std::is_same_v<T, CnotGate>) apply_cnot(amps, qubits, x.control, x.target, threads);
            else if (x.qubits.size() == 1) apply_single(amps, qubits, x.qubits.front(), x.matrix, threads);
            else apply_opaque(amps, qubits, x, threads);
        },
        g);
}

void apply(const Circuit& c, StateVector& state, int threads) {
    if (c.qubits() != state.qubits())
        throw StructuralError("circuit has " + std::to_string(c.qubits()) + " qubits, state has " +
                              std::to_string(state.qubits()));
    for (const Gate& g : c.gates()) apply(g, state.amplitudes(), c.qubits(), threads);
}

StateVector simulate(const Circuit& c, const SimOptions& opts) {
    if (c.qubits() > opts.qubit_limit)
        throw ResourceError("circuit needs " + std::to_string(c.qubits()) + " qubits, limit is " +
                            std::to_string(opts.qubit_limit));
    StateVector state(c.qubits());
    apply(c, state, opts.threads > 0 ? opts.threads : default_thread_budget());
    return state;
}

CMatrix circuit_unitary(const Circuit& c) {
    const auto dim = Eigen::Index{1} << c.qubits();
    CMatrix u(dim, dim);
    std::vector<cplx> column(static_cast<std::size_t>(dim));
    for (Eigen::Index j = 0; j < dim; ++j) {
        std::fill(column.begin(), column.end(), cplx{0.0, 0.0});
        column[static_cast<std::size_t>(j)] = 1.0;
        for (const Gate& g : c.gates()) apply(g, column, c.qubits(), 1);
        for (Eigen::Index i = 0; i < dim; ++i) u(i, j) = column[static_cast<std::size_t>(i)];
    }
    return u;
}

} // namespace tnqe
