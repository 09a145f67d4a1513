#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cli/serialize.hpp"
#include "tnqe/encoders.hpp"

namespace tnqe::cli {

namespace fs = std::filesystem;

struct JobConfig {
    Method method = Method::Amplitude;
    std::size_t rank = 4;
    std::optional<int> layers; // unitary only, default 4
    std::optional<std::string> fit; // "svd" (default) or "gradient"; full/core only
    std::optional<int> epochs;
    std::optional<double> lr;
    std::uint64_t seed = 0;
    fs::path out_dir = ".";
    bool pad = false;
    int qubit_limit = 26;

    void validate() const;
};

struct EncodeOutput {
    Encoding encoding;
    json report;
    std::optional<json> training; // loss trajectory when a fit ran
};

EncodeOutput encode_image(const Image& img, const JobConfig& cfg);

// Writes circuit.json, layout.json, report.json (and loss.json after a fit)
// into cfg.out_dir. Returns the report.
json cmd_encode(const fs::path& input, const JobConfig& cfg);

// Writes state.json.
void cmd_simulate(const fs::path& circuit, const fs::path& out_dir, int qubit_limit);

// Writes recon.pgm.
void cmd_reconstruct(const fs::path& state, const fs::path& layout, const fs::path& out_dir);

// Writes metrics.json. Returns the report.
json cmd_metrics(const fs::path& ref, const fs::path& test, const fs::path& out_dir);

struct ScalingConfig {
    std::vector<std::size_t> sizes{4, 8, 16, 32, 64, 128, 256, 512};
    std::vector<Method> methods{Method::Amplitude, Method::Full, Method::Core, Method::Unitary};
    std::size_t rank = 4;         // full / core
    std::size_t unitary_rank = 8; // unitary bond rank
    int layers = 4;
    int qubit_limit = 26;
    bool verify = false; // simulate circuits within the limit and check decode
    fs::path out_dir = ".";
};

struct ScalingRow {
    Method method;
    std::size_t size = 0;
    int qubits = 0;
    std::size_t depth = 0;
    std::size_t depth_fused = 0;
    std::size_t ops = 0;
    std::size_t cnot = 0;
    std::optional<double> oracle_error; // max-abs decode error when verified
};

std::vector<ScalingRow> scaling_rows(const ScalingConfig& cfg);

// Writes scaling.csv with header
// method,size,qubits,depth,depth_fused,ops,cnot,oracle_error
void cmd_scaling(const ScalingConfig& cfg);

} // namespace tnqe::cli
