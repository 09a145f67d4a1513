#pragma once

#include <filesystem>

#include "json.hpp"

#include "tnqe/circuit.hpp"
#include "tnqe/encoders.hpp"
#include "tnqe/metrics.hpp"

namespace tnqe::cli {

using nlohmann::json;

// {"qubits": n, "gates": [{"g":"ry","q":0,"theta":...}, {"g":"rz",...},
//  {"g":"cx","c":..,"t":..}, {"g":"u","qs":[...],"m":[[re,im],...]}]}
json to_json(const Circuit& c);
Circuit circuit_from_json(const json& j);

json to_json(const EncodingLayout& layout);
EncodingLayout layout_from_json(const json& j);

// {"qubits": n, "amplitudes": [[re, im], ...]}
json to_json(const StateVector& state);
StateVector state_from_json(const json& j);

json to_json(const GateCounts& c);
json to_json(const QualityReport& r);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

} // namespace tnqe::cli
