#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "cli/pgm.hpp"
#include "cli/synthetic.hpp"
#include "tnqe/error.hpp"
#include "tnqe/metrics.hpp"
#include "tnqe/optim.hpp"

namespace tnqe::cli {

namespace {

json loss_json(const std::vector<double>& losses, double initial, double best) {
    return {{"initial_loss", initial}, {"best_loss", best}, {"losses", losses}};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

double max_abs_diff(const Image& a, const Image& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.pixel_count(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
    return m;
}

double pixel_sum(const Image& img) {
    double s = 0.0;
    for (double v : img.pixels()) s += v;
    return s;
}

} // namespace

void JobConfig::validate() const {
    if (rank < 1) throw InvalidInput("--rank must be >= 1");
    if (layers && method != Method::Unitary) throw InvalidInput("--layers applies only to --method unitary");
    if (layers && *layers < 1) throw InvalidInput("--layers must be >= 1");
    if (fit && method != Method::Full && method != Method::Core)
        throw InvalidInput("--fit applies only to --method full or core");
    if (fit && *fit != "svd" && *fit != "gradient") throw InvalidInput("--fit must be svd or gradient");
    if (epochs && *epochs < 1) throw InvalidInput("--epochs must be >= 1");
    if (lr && !(*lr > 0.0)) throw InvalidInput("--lr must be > 0");
    if (qubit_limit < 1) throw InvalidInput("--qubit-limit must be >= 1");
}

EncodeOutput encode_image(const Image& img, const JobConfig& cfg) {
    cfg.validate();
    EncodeOutput out;
    json report{{"method", to_string(cfg.method)}, {"image_size", img.size()}};
    Image classical = img;

    switch (cfg.method) {
    case Method::Amplitude: out.encoding = encode_amplitude(img); break;
    case Method::Full:
    case Method::Core: {
        const std::string fit = cfg.fit.value_or("svd");
        QttCores cores;
        if (fit == "gradient") {
            OptConfig oc = OptConfig::qtt_defaults();
            if (cfg.epochs) oc.epochs = *cfg.epochs;
            if (cfg.lr) oc.learning_rate = *cfg.lr;
            oc.seed = cfg.seed;
            QttFit f = fit_qtt(img, cfg.rank, oc);
            out.training = loss_json(f.losses, f.initial_loss, f.best_loss);
            cores = std::move(f.cores);
        } else {
            cores = tt_svd(quantize_image(img), cfg.rank).cores;
        }
        classical = contract(cores);
        out.encoding = cfg.method == Method::Full ? encode_full(cores) : encode_core(cores);
        report["rank"] = cfg.rank;
        report["fit"] = fit;
        report["bond_dims"] = cores.bond_dims();
        break;
    }
    case Method::Unitary: {
        OptConfig oc = OptConfig::unitary_defaults();
        if (cfg.epochs) oc.epochs = *cfg.epochs;
        if (cfg.lr) oc.learning_rate = *cfg.lr;
        oc.seed = cfg.seed;
        const int layers = cfg.layers.value_or(4);
        UnitaryFit f = fit_unitary(img, cfg.rank, layers, oc);
        out.training = loss_json(f.losses, f.initial_loss, f.best_loss);
        const UnitaryKlObjective obj(img, bond_qubits_for_rank(cfg.rank), layers);
        classical = obj.reconstruct(obj.pack(f.blocks));
        out.encoding = encode_unitary(f.blocks, pixel_sum(img));
        report["rank"] = cfg.rank;
        report["layers"] = layers;
        report["seed"] = cfg.seed;
        break;
    }
    }

    const Circuit& c = out.encoding.circuit;
    report["qubits"] = c.qubits();
    report["depth"] = depth(c, DepthMode::Logical);
    report["depth_fused"] = depth(c, DepthMode::FusedSingleQubit);
    report["counts"] = to_json(counts(c));
    report["global_norm"] = out.encoding.layout.global_norm;
    report["classical_quality"] = to_json(evaluate(img, classical));
    out.report = std::move(report);
    return out;
}

json cmd_encode(const fs::path& input, const JobConfig& cfg) {
    cfg.validate();
    const Image img = load_image(input, cfg.pad);
    EncodeOutput out = encode_image(img, cfg);
    ensure_dir(cfg.out_dir);
    write_json(cfg.out_dir / "circuit.json", to_json(out.encoding.circuit));
    write_json(cfg.out_dir / "layout.json", to_json(out.encoding.layout));
    write_json(cfg.out_dir / "report.json", out.report);
    if (out.training) write_json(cfg.out_dir / "loss.json", *out.training);
    return out.report;
}

void cmd_simulate(const fs::path& circuit, const fs::path& out_dir, int qubit_limit) {
    const Circuit c = circuit_from_json(read_json(circuit));
    SimOptions opts;
    opts.qubit_limit = qubit_limit;
    const StateVector state = simulate(c, opts);
    ensure_dir(out_dir);
    write_json(out_dir / "state.json", to_json(state));
}

void cmd_reconstruct(const fs::path& state, const fs::path& layout, const fs::path& out_dir) {
    const StateVector s = state_from_json(read_json(state));
    const EncodingLayout l = layout_from_json(read_json(layout));
    const Image img = decode(s, l);
    ensure_dir(out_dir);
    write_pgm(out_dir / "recon.pgm", img);
}

json cmd_metrics(const fs::path& ref, const fs::path& test, const fs::path& out_dir) {
    const json j = to_json(evaluate(load_image(ref), load_image(test)));
    ensure_dir(out_dir);
    write_json(out_dir / "metrics.json", j);
    return j;
}

std::vector<ScalingRow> scaling_rows(const ScalingConfig& cfg) {
    for (std::size_t s : cfg.sizes)
        if (!is_power_of_two(s) || s < 2) throw InvalidInput("scaling size " + std::to_string(s) + " is not a power of two >= 2");
    std::vector<ScalingRow> rows;
    for (Method m : cfg.methods)
        for (std::size_t s : cfg.sizes) {
            const Image img = gaussian_blob(s);
            Encoding enc;
            std::optional<Image> expected;
            switch (m) {
            case Method::Amplitude:
                enc = encode_amplitude(img);
                expected = img;
                break;
            case Method::Full:
            case Method::Core: {
                const QttCores cores = tt_svd(quantize_image(img), cfg.rank).cores;
                enc = m == Method::Full ? encode_full(cores) : encode_core(cores);
                expected = contract(cores);
                break;
            }
            case Method::Unitary: {
                // Counts do not depend on the angles; use seeded random ones.
                const int nb = bond_qubits_for_rank(cfg.unitary_rank);
                const UnitaryKlObjective obj(img, nb, cfg.layers);
                std::mt19937_64 rng(s);
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                std::vector<double> x(obj.parameter_count());
                for (double& v : x) v = u(rng);
                enc = encode_unitary(obj.unpack(x), pixel_sum(img));
                if (cfg.verify && enc.circuit.qubits() <= cfg.qubit_limit) expected = obj.reconstruct(x);
                break;
            }
            }
            ScalingRow row{m, s, enc.circuit.qubits(), depth(enc.circuit, DepthMode::Logical),
                           depth(enc.circuit, DepthMode::FusedSingleQubit), 0, 0, std::nullopt};
            const GateCounts gc = counts(enc.circuit);
            row.ops = gc.total;
            row.cnot = gc.cnot;
            if (cfg.verify && row.qubits <= cfg.qubit_limit && expected) {
                SimOptions opts;
                opts.qubit_limit = cfg.qubit_limit;
                row.oracle_error = max_abs_diff(decode(simulate(enc.circuit, opts), enc.layout), *expected);
            }
            rows.push_back(row);
        }
    return rows;
}

void cmd_scaling(const ScalingConfig& cfg) {
    const auto rows = scaling_rows(cfg);
    ensure_dir(cfg.out_dir);
    const fs::path path = cfg.out_dir / "scaling.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "method,size,qubits,depth,depth_fused,ops,cnot,oracle_error\n";
    for (const auto& r : rows) {
        out << to_string(r.method) << ',' << r.size << ',' << r.qubits << ',' << r.depth << ',' << r.depth_fused
            << ',' << r.ops << ',' << r.cnot << ',';
        if (r.oracle_error) out << *r.oracle_error;
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace tnqe::cli
