#include "tnqe/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tnqe/canonical.hpp"
#include "tnqe/error.hpp"
#include "tnqe/synthesis.hpp"

namespace tnqe {

namespace {

std::vector<Register> level_registers(int levels, int first_qubit) {
    std::vector<Register> regs;
    for (int k = 0; k < levels; ++k)
        regs.push_back({"level" + std::to_string(k + 1), {first_qubit + 2 * k, first_qubit + 2 * k + 1}});
    return regs;
}

// Local block qubits [p0, p1, bond...] -> global qubits for level k.
std::vector<int> block_qubit_map(int bond_qubits, int level_index) {
    std::vector<int> map{bond_qubits + 2 * level_index, bond_qubits + 2 * level_index + 1};
    for (int q = 0; q < bond_qubits; ++q) map.push_back(q);
    return map;
}

double signed_magnitude(const cplx& a) { return a.real() < 0.0 ? -std::abs(a) : std::abs(a); }

Image image_from_values(std::vector<cplx> values, int levels) {
    align_global_phase(values);
    QuantizedTensor t{levels, std::vector<double>(values.size())};
    std::transform(values.begin(), values.end(), t.values.begin(), signed_magnitude);
    return dequantize(t);
}

Image decode_core(std::span<const cplx> amps, const EncodingLayout& layout) {
    const int n = layout.qubit_count();
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < amps.size(); ++i)
        if (std::abs(amps[i]) > std::abs(amps[pivot])) pivot = i;
    const std::size_t side = std::size_t{1} << layout.levels;
    if (std::abs(amps[pivot]) == 0.0) return Image::zeros(side);

    QttCores cores;
    cores.scale = layout.global_norm;
    int start = 0;
    for (std::size_t k = 0; k < layout.registers.size(); ++k) {
        const int width = static_cast<int>(layout.registers[k].qubits.size());
        const int shift = n - start - width;
        const std::size_t mask = ((std::size_t{1} << width) - 1) << shift;
        const std::size_t base = pivot & ~mask;
        std::vector<cplx> slice(std::size_t{1} << width);
        double norm = 0.0;
        for (std::size_t x = 0; x < slice.size(); ++x) {
            slice[x] = amps[base | (x << shift)];
            norm += std::norm(slice[x]);
        }
        norm = std::sqrt(norm);
        const auto [left, right] = layout.core_bonds[k];
        QttCore core(left, right);
        for (std::size_t i = 0; i < core.data.size(); ++i) core.data[i] = slice[i] / norm * layout.core_norms[k];
        cores.cores.push_back(std::move(core));
        start += width;
    }
    return image_from_values(contract_values(cores), layout.levels);
}

} // namespace

std::string to_string(Method m) {
    switch (m) {
    case Method::Amplitude: return "amplitude";
    case Method::Full: return "full";
    case Method::Core: return "core";
    case Method::Unitary: return "unitary";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    if (name == "amplitude") return Method::Amplitude;
    if (name == "full") return Method::Full;
    if (name == "core") return Method::Core;
    if (name == "unitary") return Method::Unitary;
    throw InvalidInput("unknown method '" + name + "' (expected amplitude, full, core or unitary)");
}

int EncodingLayout::qubit_count() const noexcept {
    int n = 0;
    for (const auto& r : registers) n += static_cast<int>(r.qubits.size());
    return n;
}

void EncodingLayout::validate() const {
    if (!is_power_of_two(image_size) || (std::size_t{1} << levels) != image_size)
        throw StructuralError("layout image size and level count disagree");
    if (!(global_norm >= 0.0)) throw StructuralError("layout norm must be >= 0");
    if (method == Method::Core) {
        if (core_norms.size() != static_cast<std::size_t>(levels) || core_bonds.size() != core_norms.size() ||
            registers.size() != core_norms.size())
            throw StructuralError("core-wise layout needs one register, norm and bond pair per level");
        for (double v : core_norms)
            if (!(v > 0.0)) throw StructuralError("core-wise norms must be > 0");
        for (std::size_t k = 0; k < core_bonds.size(); ++k)
            if (4 * core_bonds[k].first * core_bonds[k].second > (std::size_t{1} << registers[k].qubits.size()))
                throw StructuralError("core " + std::to_string(k + 1) + " does not fit its register");
    } else if (method != Method::Amplitude) {
        if (qubit_count() != bond_qubits + 2 * levels)
            throw StructuralError("sequential layout must have N_b + 2L qubits");
    } else if (qubit_count() != 2 * levels) {
        throw StructuralError("amplitude layout must have 2L qubits");
    }
}

Encoding encode_amplitude(const Image& img) {
    const QuantizedTensor t = quantize_image(img);
    double norm = 0.0;
    for (double v : t.values) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw InvalidInput("cannot amplitude-encode an all-zero image");
    std::vector<cplx> amps(t.values.size());
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = t.values[i] / norm;

    Encoding out{prepare_state(amps, false), {}};
    out.layout.method = Method::Amplitude;
    out.layout.image_size = img.size();
    out.layout.levels = img.levels();
    out.layout.registers = level_registers(img.levels(), 0);
    out.layout.global_norm = norm;
    return out;
}

Encoding encode_full(const QttCores& cores, const FullOptions& opts) {
    const CanonicalMps mps = normalize_global(right_canonicalize(to_mps(cores)));
    std::size_t bond = 1;
    for (const auto& c : mps.cores) bond = std::max({bond, c.left, c.right});
    const int nb = log2_exact(bond);
    const int levels = static_cast<int>(mps.cores.size());
    const auto rows = static_cast<Eigen::Index>(4 * bond);

    Encoding out{Circuit(nb + 2 * levels), {}};
    for (int k = 0; k < levels; ++k) {
        const MpsCore& core = mps.cores[static_cast<std::size_t>(k)];
        CMatrix iso = CMatrix::Zero(rows, static_cast<Eigen::Index>(core.left));
        for (std::size_t a = 0; a < core.left; ++a)
            for (int p = 0; p < 4; ++p)
                for (std::size_t b = 0; b < core.right; ++b)
                    iso(static_cast<Eigen::Index>(static_cast<std::size_t>(p) * bond + b), static_cast<Eigen::Index>(a)) =
                        core.at(a, p, b);
        const CMatrix u = complete_to_unitary(iso);
        const auto map = block_qubit_map(nb, k);
        if (opts.synthesize) out.circuit.append(decompose_unitary(u), map);
        else out.circuit.add(OpaqueGate{map, u});
    }

    auto& layout = out.layout;
    layout.method = Method::Full;
    layout.levels = levels;
    layout.image_size = std::size_t{1} << levels;
    layout.bond_qubits = nb;
    std::vector<int> bond_reg(static_cast<std::size_t>(nb));
    for (int q = 0; q < nb; ++q) bond_reg[static_cast<std::size_t>(q)] = q;
    layout.registers.push_back({"bond", bond_reg});
    for (auto& r : level_registers(levels, nb)) layout.registers.push_back(std::move(r));
    layout.global_norm = mps.norm;
    return out;
}

Encoding encode_core(const QttCores& cores) {
    cores.validate();
    Encoding out;
    auto& layout = out.layout;
    layout.method = Method::Core;
    layout.levels = cores.levels();
    layout.image_size = std::size_t{1} << cores.levels();
    layout.global_norm = cores.scale;

    int next_qubit = 0;
    for (std::size_t k = 0; k < cores.cores.size(); ++k) {
        const QttCore& core = cores.cores[k];
        double norm = 0.0;
        for (const cplx& v : core.data) norm += std::norm(v);
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) throw InvalidInput("core " + std::to_string(k + 1) + " is zero and cannot be normalised");

        std::vector<cplx> amps(next_power_of_two(core.data.size()), cplx{0.0, 0.0});
        for (std::size_t i = 0; i < core.data.size(); ++i) amps[i] = core.data[i] / norm;
        const Circuit sub = prepare_state(amps);
        out.circuit = tensor_with(out.circuit, sub);

        Register reg{"core" + std::to_string(k + 1), {}};
        for (int q = 0; q < sub.qubits(); ++q) reg.qubits.push_back(next_qubit++);
        layout.registers.push_back(std::move(reg));
        layout.core_norms.push_back(norm);
        layout.core_bonds.emplace_back(core.left, core.right);
    }
    return out;
}

BlockParams::BlockParams(int bond_qubits, int layers) : bond_qubits_(bond_qubits), layers_(layers) {
    if (bond_qubits < 0) throw InvalidInput("bond qubit count must be >= 0");
    if (layers < 1) throw InvalidInput("block needs at least one layer");
    angles_.assign(static_cast<std::size_t>(2 * (bond_qubits + 2) * layers), 0.0);
}

int bond_qubits_for_rank(std::size_t rank) noexcept { return ceil_log2(std::max<std::size_t>(rank, 1)); }

std::vector<CnotGate> entangler_pattern(int bond_qubits) {
    const int nq = bond_qubits + 2;
    std::vector<CnotGate> edges;
    for (int q = 0; q + 1 < bond_qubits; ++q) edges.push_back({2 + q, 3 + q});
    for (int q = 0; q < bond_qubits; ++q) edges.push_back({2 + q, q % 2});
    edges.push_back({0, 1});

    // Bipartite edge colouring (bond parity / physical index split) by
    // alternating-path recolouring; uses exactly max-degree colours.
    const std::size_t palette = edges.size();
    std::vector<std::vector<int>> slot(static_cast<std::size_t>(nq), std::vector<int>(palette, -1));
    std::vector<std::size_t> colour(edges.size(), 0);
    const auto free_colour = [&](int v) {
        std::size_t c = 0;
        while (slot[static_cast<std::size_t>(v)][c] != -1) ++c;
        return c;
    };
    const auto other_end = [&](int e, int v) {
        const auto& g = edges[static_cast<std::size_t>(e)];
        return g.control == v ? g.target : g.control;
    };
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int u = edges[e].control, v = edges[e].target;
        const std::size_t a = free_colour(u);
        if (slot[static_cast<std::size_t>(v)][a] != -1) {
            const std::size_t b = free_colour(v);
            // Swap colours a <-> b along the a/b path starting at v.
            std::vector<int> path;
            int at = v;
            std::size_t want = a;
            while (slot[static_cast<std::size_t>(at)][want] != -1) {
                const int edge = slot[static_cast<std::size_t>(at)][want];
                path.push_back(edge);
                at = other_end(edge, at);
                want = (want == a) ? b : a;
            }
            for (int edge : path) {
                const auto& g = edges[static_cast<std::size_t>(edge)];
                slot[static_cast<std::size_t>(g.control)][colour[static_cast<std::size_t>(edge)]] = -1;
                slot[static_cast<std::size_t>(g.target)][colour[static_cast<std::size_t>(edge)]] = -1;
            }
            for (int edge : path) {
                auto& c = colour[static_cast<std::size_t>(edge)];
                c = (c == a) ? b : a;
                const auto& g = edges[static_cast<std::size_t>(edge)];
                slot[static_cast<std::size_t>(g.control)][c] = edge;
                slot[static_cast<std::size_t>(g.target)][c] = edge;
            }
        }
        colour[e] = a;
        slot[static_cast<std::size_t>(u)][a] = static_cast<int>(e);
        slot[static_cast<std::size_t>(v)][a] = static_cast<int>(e);
    }

    std::vector<std::size_t> order(edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return colour[x] < colour[y]; });
    std::vector<CnotGate> out;
    for (std::size_t i : order) out.push_back(edges[i]);
    return out;
}

Circuit block_fragment(const BlockParams& params) {
    Circuit c(params.arity());
    const auto pattern = entangler_pattern(params.bond_qubits());
    for (int l = 0; l < params.layers(); ++l) {
        for (int q = 0; q < params.arity(); ++q) {
            c.ry(q, params.alpha(l, q));
            c.rz(q, params.beta(l, q));
        }
        for (const auto& g : pattern) c.add(g);
    }
    return c;
}

BlockUnitary build_block_unitary(const BlockParams& params) {
    BlockUnitary out;
    out.fragment = block_fragment(params);
    out.matrix = circuit_unitary(out.fragment);
    return out;
}

QttCore extract_core(const CMatrix& u, std::size_t r_in, std::size_t r_out) {
    if (u.rows() != u.cols() || !is_power_of_two(static_cast<std::size_t>(u.rows())) || u.rows() < 4)
        throw InvalidInput("block unitary must be square on at least two qubits");
    const std::size_t bond = static_cast<std::size_t>(u.rows()) / 4;
    if (r_in < 1 || r_out < 1 || r_in > bond || r_out > bond)
        throw InvalidInput("requested bonds (" + std::to_string(r_in) + ", " + std::to_string(r_out) +
                           ") exceed the block's bond register of " + std::to_string(bond));
    QttCore core(r_in, r_out);
    for (std::size_t a = 0; a < r_in; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (std::size_t b = 0; b < r_out; ++b)
                    core.at(a, i, j, b) = u(static_cast<Eigen::Index>(static_cast<std::size_t>(2 * i + j) * bond + b),
                                            static_cast<Eigen::Index>(a));
    return core;
}

QttCores unitary_cores(std::span<const BlockParams> blocks) {
    if (blocks.empty()) throw InvalidInput("need at least one block");
    const int nb = blocks.front().bond_qubits();
    const std::size_t bond = std::size_t{1} << nb;
    QttCores out;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        if (blocks[k].bond_qubits() != nb) throw InvalidInput("all blocks must share the bond register size");
        const std::size_t r_in = k == 0 ? 1 : bond;
        const std::size_t r_out = k + 1 == blocks.size() ? 1 : bond;
        out.cores.push_back(extract_core(build_block_unitary(blocks[k]).matrix, r_in, r_out));
    }
    return out;
}

Encoding encode_unitary(std::span<const BlockParams> blocks, double mass) {
    if (blocks.empty()) throw InvalidInput("need at least one block");
    const int nb = blocks.front().bond_qubits();
    const int levels = static_cast<int>(blocks.size());
    Encoding out{Circuit(nb + 2 * levels), {}};
    for (int k = 0; k < levels; ++k) {
        if (blocks[static_cast<std::size_t>(k)].bond_qubits() != nb)
            throw InvalidInput("all blocks must share the bond register size");
        out.circuit.append(block_fragment(blocks[static_cast<std::size_t>(k)]), block_qubit_map(nb, k));
    }
    auto& layout = out.layout;
    layout.method = Method::Unitary;
    layout.levels = levels;
    layout.image_size = std::size_t{1} << levels;
    layout.bond_qubits = nb;
    std::vector<int> bond_reg(static_cast<std::size_t>(nb));
    for (int q = 0; q < nb; ++q) bond_reg[static_cast<std::size_t>(q)] = q;
    layout.registers.push_back({"bond", bond_reg});
    for (auto& r : level_registers(levels, nb)) layout.registers.push_back(std::move(r));
    layout.global_norm = mass;
    return out;
}

Image decode(const StateVector& state, const EncodingLayout& layout) {
    layout.validate();
    if (state.qubits() != layout.qubit_count())
        throw StructuralError("state has " + std::to_string(state.qubits()) + " qubits, layout expects " +
                              std::to_string(layout.qubit_count()));
    const auto amps = state.amplitudes();
    const std::size_t pixels = std::size_t{1} << (2 * layout.levels);

    switch (layout.method) {
    case Method::Core: return decode_core(amps, layout);
    case Method::Unitary: {
        // Bond qubits are the most significant bits, so bond = |0..0> is the
        // leading slice.
        double total = 0.0;
        for (std::size_t i = 0; i < pixels; ++i) total += std::norm(amps[i]);
        QuantizedTensor t{layout.levels, std::vector<double>(pixels, 0.0)};
        if (total > 0.0)
            for (std::size_t i = 0; i < pixels; ++i) t.values[i] = layout.global_norm * std::norm(amps[i]) / total;
        return dequantize(t);
    }
    case Method::Amplitude:
    case Method::Full: {
        std::vector<cplx> values(amps.begin(), amps.begin() + static_cast<std::ptrdiff_t>(pixels));
        for (cplx& v : values) v *= layout.global_norm;
        return image_from_values(std::move(values), layout.levels);
    }
    }
    throw StructuralError("unknown layout method");
}

} // namespace tnqe
