#include "cli/serialize.hpp"

#include <fstream>
#include <string>

#include "tnqe/error.hpp"

namespace tnqe::cli {

namespace {

json complex_pair(const cplx& v) { return json::array({v.real(), v.imag()}); }

cplx pair_value(const json& j) {
    if (!j.is_array() || j.size() != 2) throw StructuralError("complex values must be [re, im] pairs");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

// Runs a schema reader and turns json type/key errors into StructuralError.
template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw StructuralError(std::string("malformed ") + what + ": " + e.what());
    }
}

} // namespace

json to_json(const Circuit& c) {
    json gates = json::array();
    for (const Gate& g : c.gates()) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, RyGate>) gates.push_back({{"g", "ry"}, {"q", v.qubit}, {"theta", v.angle}});
                else if constexpr (std::is_same_v<T, RzGate>)
                    gates.push_back({{"g", "rz"}, {"q", v.qubit}, {"theta", v.angle}});
                else if constexpr (std::is_same_v<T, CnotGate>)
                    gates.push_back({{"g", "cx"}, {"c", v.control}, {"t", v.target}});
                else {
                    json m = json::array();
                    for (Eigen::Index r = 0; r < v.matrix.rows(); ++r)
                        for (Eigen::Index k = 0; k < v.matrix.cols(); ++k) m.push_back(complex_pair(v.matrix(r, k)));
                    gates.push_back({{"g", "u"}, {"qs", v.qubits}, {"m", m}});
                }
            },
            g);
    }
    return {{"qubits", c.qubits()}, {"gates", gates}};
}

Circuit circuit_from_json(const json& j) {
    return guarded("circuit", [&] {
        Circuit c(j.at("qubits").get<int>());
        for (const json& g : j.at("gates")) {
            const std::string kind = g.at("g").get<std::string>();
            if (kind == "ry") c.ry(g.at("q").get<int>(), g.at("theta").get<double>());
            else if (kind == "rz") c.rz(g.at("q").get<int>(), g.at("theta").get<double>());
            else if (kind == "cx") c.cx(g.at("c").get<int>(), g.at("t").get<int>());
            else if (kind == "u") {
                const auto qs = g.at("qs").get<std::vector<int>>();
                const json& m = g.at("m");
                const Eigen::Index dim = Eigen::Index{1} << qs.size();
                if (qs.size() > 16 || m.size() != static_cast<std::size_t>(dim * dim))
                    throw StructuralError("opaque gate matrix has " + std::to_string(m.size()) + " entries");
                CMatrix u(dim, dim);
                for (Eigen::Index r = 0; r < dim; ++r)
                    for (Eigen::Index k = 0; k < dim; ++k) u(r, k) = pair_value(m.at(static_cast<std::size_t>(r * dim + k)));
                c.add(OpaqueGate{qs, u});
            } else {
                throw StructuralError("unknown gate kind '" + kind + "'");
            }
        }
        return c;
    });
}

json to_json(const EncodingLayout& layout) {
    json regs = json::array();
    for (const auto& r : layout.registers) regs.push_back({{"name", r.name}, {"qubits", r.qubits}});
    json bonds = json::array();
    for (const auto& [l, r] : layout.core_bonds) bonds.push_back({l, r});
    return {{"version", TNQE_VERSION},
            {"method", to_string(layout.method)},
            {"image_size", layout.image_size},
            {"levels", layout.levels},
            {"bond_qubits", layout.bond_qubits},
            {"bit_order", layout.bit_order},
            {"global_norm", layout.global_norm},
            {"registers", regs},
            {"core_norms", layout.core_norms},
            {"core_bonds", bonds}};
}

EncodingLayout layout_from_json(const json& j) {
    EncodingLayout layout = guarded("layout", [&] {
        EncodingLayout l;
        l.method = method_from_string(j.at("method").get<std::string>());
        l.image_size = j.at("image_size").get<std::size_t>();
        l.levels = j.at("levels").get<int>();
        l.bond_qubits = j.at("bond_qubits").get<int>();
        l.bit_order = j.at("bit_order").get<std::string>();
        l.global_norm = j.at("global_norm").get<double>();
        for (const json& r : j.at("registers"))
            l.registers.push_back({r.at("name").get<std::string>(), r.at("qubits").get<std::vector<int>>()});
        l.core_norms = j.value("core_norms", std::vector<double>{});
        for (const json& b : j.value("core_bonds", json::array()))
            l.core_bonds.emplace_back(b.at(0).get<std::size_t>(), b.at(1).get<std::size_t>());
        return l;
    });
    if (layout.bit_order != kBitOrderTag)
        throw StructuralError("layout bit order '" + layout.bit_order + "' is not supported (expected " +
                              kBitOrderTag + ")");
    layout.validate();
    return layout;
}

json to_json(const StateVector& state) {
    json amps = json::array();
    for (const cplx& a : state.amplitudes()) amps.push_back(complex_pair(a));
    return {{"qubits", state.qubits()}, {"amplitudes", amps}};
}

StateVector state_from_json(const json& j) {
    return guarded("state", [&] {
        const int n = j.at("qubits").get<int>();
        const json& amps = j.at("amplitudes");
        if (n < 0 || n > 40 || amps.size() != (std::size_t{1} << n))
            throw StructuralError("state of " + std::to_string(n) + " qubits has " + std::to_string(amps.size()) +
                                  " amplitudes");
        std::vector<cplx> v;
        v.reserve(amps.size());
        for (const json& a : amps) v.push_back(pair_value(a));
        return StateVector(n, std::move(v));
    });
}

json to_json(const GateCounts& c) {
    return {{"single_qubit", c.single_qubit},           {"cnot", c.cnot},
            {"opaque", c.opaque},                       {"total", c.total},
            {"fused_single_qubit", c.fused_single_qubit}, {"fused_total", c.fused_total}};
}

json to_json(const QualityReport& r) {
    return {{"mse", r.mse}, {"bce", r.bce}, {"psnr", r.psnr}, {"ssim", r.ssim}, {"clamped", r.clamped}};
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": invalid JSON (" + e.what() + ")");
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(1) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace tnqe::cli
