#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "tnqe/error.hpp"

namespace {

using namespace tnqe;
using namespace tnqe::cli;

int fail(const std::string& kind, const std::string& message) {
    std::string line = message;
    for (char& c : line)
        if (c == '\n') c = ' ';
    std::cerr << "tnqe-error[" << kind << "]: " << line << '\n';
    return 2;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compile images into quantum encoding circuits via quantized tensor trains"};
    app.require_subcommand(1);
    app.set_version_flag("--version", TNQE_VERSION);

    JobConfig job;
    std::string input, method = "amplitude", fit;
    int layers = 4, epochs = 0;
    double lr = 0.0;
    auto* enc = app.add_subcommand("encode", "Build circuit.json, layout.json and report.json from a PGM image");
    enc->add_option("--input", input, "Input PGM (P2 or P5)")->required();
    enc->add_option("--method", method, "amplitude | full | core | unitary")->capture_default_str();
    enc->add_option("--rank", job.rank, "Max QTT rank r")->capture_default_str();
    auto* layers_opt = enc->add_option("--layers", layers, "Layers per block (unitary)");
    auto* fit_opt = enc->add_option("--fit", fit, "svd | gradient (full, core)");
    auto* epochs_opt = enc->add_option("--epochs", epochs, "Training epochs");
    auto* lr_opt = enc->add_option("--lr", lr, "Learning rate (peak rate for unitary)");
    enc->add_option("--seed", job.seed, "Seed for parameter initialisation")->capture_default_str();
    enc->add_option("--out-dir", job.out_dir, "Output directory")->capture_default_str();
    enc->add_flag("--pad", job.pad, "Zero-pad to the next power-of-two square");
    enc->add_option("--qubit-limit", job.qubit_limit, "Simulation qubit limit")->capture_default_str();

    std::string circuit_path;
    fs::path out_dir = ".";
    int qubit_limit = 26;
    auto* sim = app.add_subcommand("simulate", "Simulate circuit.json exactly into state.json");
    sim->add_option("--input", circuit_path, "circuit.json")->required();
    sim->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    sim->add_option("--qubit-limit", qubit_limit, "Refuse circuits above this many qubits")->capture_default_str();

    std::string state_path, layout_path;
    auto* rec = app.add_subcommand("reconstruct", "Decode state.json with layout.json into recon.pgm");
    rec->add_option("--input", state_path, "state.json")->required();
    rec->add_option("--layout", layout_path, "layout.json")->required();
    rec->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

    std::string ref_path, test_path;
    auto* met = app.add_subcommand("metrics", "Compare two PGM images into metrics.json");
    met->add_option("--ref", ref_path, "Reference PGM")->required();
    met->add_option("--test", test_path, "Test PGM")->required();
    met->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

    ScalingConfig sc;
    std::string sizes = "4,8,16,32,64,128,256,512", methods = "amplitude,full,core,unitary";
    auto* scl = app.add_subcommand("scaling", "Resource counts over image sizes into scaling.csv");
    scl->add_option("--sizes", sizes, "Comma-separated power-of-two sizes")->capture_default_str();
    scl->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
    scl->add_option("--rank", sc.rank, "Rank for full and core")->capture_default_str();
    scl->add_option("--unitary-rank", sc.unitary_rank, "Bond rank for unitary")->capture_default_str();
    scl->add_option("--layers", sc.layers, "Layers per block for unitary")->capture_default_str();
    scl->add_option("--qubit-limit", sc.qubit_limit, "Only verify circuits up to this size")->capture_default_str();
    scl->add_flag("--verify", sc.verify, "Simulate circuits within the limit and check the decode");
    scl->add_option("--out-dir", sc.out_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what());
    }

    try {
        if (*enc) {
            job.method = method_from_string(method);
            if (*layers_opt) job.layers = layers;
            if (*fit_opt) job.fit = fit;
            if (*epochs_opt) job.epochs = epochs;
            if (*lr_opt) job.lr = lr;
            const json report = cmd_encode(input, job);
            std::cout << report.dump() << '\n';
        } else if (*sim) {
            cmd_simulate(circuit_path, out_dir, qubit_limit);
        } else if (*rec) {
            cmd_reconstruct(state_path, layout_path, out_dir);
        } else if (*met) {
            std::cout << cmd_metrics(ref_path, test_path, out_dir).dump() << '\n';
        } else if (*scl) {
            sc.sizes.clear();
            for (const auto& s : split(sizes)) {
                try {
                    sc.sizes.push_back(std::stoul(s));
                } catch (const std::exception&) {
                    return fail("usage", "bad size '" + s + "'");
                }
            }
            sc.methods.clear();
            for (const auto& m : split(methods)) sc.methods.push_back(method_from_string(m));
            cmd_scaling(sc);
        }
    } catch (const Error& e) {
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
