#pragma once

#include "dthp/model.hpp"
#include "dthp/prior.hpp"
#include "dthp/sampler.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dthp {

inline constexpr const char* version_string = "dthp 0.1.0";

struct SimulationSection {
    std::optional<DthpModel> model;
    std::size_t steps = 500;
    std::size_t replicates = 1;
    double count_ceiling = 1e9;

    bool operator==(const SimulationSection&) const = default;
};

struct PriorSection {
    PriorSetting setting = PriorSetting::relatively_informative;
    StructurePrior structure = StructurePrior::uniform_components;
    /// Keyed by "baseline", "magnitude" or "height".
    std::map<std::string, ContinuousPrior> overrides;
    /// Model whose parameters the informative setting centres on. Either inline
    /// or a path to a model JSON file.
    std::optional<DthpModel> truth;
    std::optional<std::string> truth_path;

    bool operator==(const PriorSection&) const = default;
};

/// One JSON document drives `simulate`, `fit` and `fit-geometric`.
struct RunConfig {
    std::uint64_t seed = 1;
    std::optional<std::string> data_path;
    /// 0-based columns to keep; empty keeps all.
    std::vector<std::size_t> dimensions;
    std::vector<std::string> labels;
    /// One global maximum lag or K*K per-pair values.
    std::vector<int> max_lags{7};
    PriorSection prior;
    ChainConfig chain;
    std::vector<std::size_t> phase_boundaries;
    std::size_t smoothing_window = 0;
    bool allow_real_counts = false;
    std::string output_dir = "out";
    SimulationSection simulation;

    /// Chain settings with the run seed applied.
    [[nodiscard]] ChainConfig chain_config() const;
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

[[nodiscard]] nlohmann::json to_json(const RunConfig& config);
[[nodiscard]] RunConfig run_config_from_json(const nlohmann::json& json);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
[[nodiscard]] std::string config_hash(const RunConfig& config);
[[nodiscard]] std::string fnv1a_hex(const std::string& bytes);

/// Prior for a K-dimensional fit. The informative setting reads the truth
/// model (inline or from truth_path).
[[nodiscard]] PriorConfig make_prior_config(const RunConfig& config, std::size_t dims);

[[nodiscard]] nlohmann::json to_json(const ContinuousPrior& prior);
[[nodiscard]] ContinuousPrior continuous_prior_from_json(const nlohmann::json& json);

}  // namespace dthp
