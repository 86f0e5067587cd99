#pragma once

#include "dthp/kernel.hpp"
#include "dthp/model.hpp"
#include "dthp/sampler.hpp"
#include "dthp/trace.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace dthp {

[[nodiscard]] nlohmann::json to_json(const Kernel& kernel);
[[nodiscard]] Kernel kernel_from_json(const nlohmann::json& json);

/// {"K", "mu", "alpha" (K rows), "kernels" (K rows of kernel objects)}
[[nodiscard]] nlohmann::json to_json(const DthpModel& model);
[[nodiscard]] DthpModel model_from_json(const nlohmann::json& json);
[[nodiscard]] DthpModel load_model(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json to_json(const MoveCounters& counters);
[[nodiscard]] MoveCounters move_counters_from_json(const nlohmann::json& json);

[[nodiscard]] nlohmann::json to_json(const Draw& draw);
[[nodiscard]] Draw draw_from_json(const nlohmann::json& json);

[[nodiscard]] nlohmann::json to_json(const Checkpoint& checkpoint);
[[nodiscard]] Checkpoint checkpoint_from_json(const nlohmann::json& json);

[[nodiscard]] std::string gzip_compress(const std::string& data);
[[nodiscard]] std::string gzip_decompress(const std::string& data);

/// Single-chain trace as gzip-compressed JSON lines: a header record
/// {"format": "dthp-trace", "version", "dims", "family", "chain",
/// "counters", "provenance"} followed by one draw per line.
void write_trace(const std::filesystem::path& path, const SampleTrace& chain_trace,
                 const nlohmann::json& provenance);
[[nodiscard]] SampleTrace read_trace(const std::filesystem::path& path);
/// Provenance object stored in a trace header.
[[nodiscard]] nlohmann::json read_trace_provenance(const std::filesystem::path& path);

/// Pretty-printed (2-space indent, trailing newline), written atomically.
void write_json(const std::filesystem::path& path, const nlohmann::json& json);
[[nodiscard]] nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace dthp
