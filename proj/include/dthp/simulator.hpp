#pragma once

#include "dthp/count_series.hpp"
#include "dthp/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dthp {

struct SimulationConfig {
    DthpModel model;
    std::size_t steps = 500;
    std::uint64_t seed = 1;
    std::size_t replicates = 1;
    /// Abort once any intensity exceeds this many events per day.
    double count_ceiling = 1e9;

    /// Throws on invalid model or horizon; returns a warning for an unstable
    /// magnitude matrix.
    [[nodiscard]] std::optional<std::string> validate() const;
};

/// Draw y_t^k ~ Poisson(lambda^k(t)) for t = 1..T, dimensions in order within
/// each day, from the config's seed as given.
[[nodiscard]] CountSeries simulate(const SimulationConfig& config);

/// Replicate r uses derive_seed(seed, replicate, r), so any replicate can be
/// regenerated alone with `simulate_replicate`.
[[nodiscard]] std::vector<CountSeries> simulate_batch(const SimulationConfig& config,
                                                      std::size_t replicates);
[[nodiscard]] CountSeries simulate_replicate(const SimulationConfig& config, std::size_t replicate);

}  // namespace dthp
