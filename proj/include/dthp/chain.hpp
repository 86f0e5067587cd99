#pragma once

#include "dthp/count_series.hpp"
#include "dthp/prior.hpp"
#include "dthp/sampler.hpp"
#include "dthp/trace.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dthp {

/// Maximum lag of every pair: a single value broadcast, or K*K values.
[[nodiscard]] std::vector<int> expand_max_lags(std::span<const int> max_lags, std::size_t dims);

struct ChainOutput {
    SampleTrace trace;
    Checkpoint final_state;
};

/// One chain, seeded by derive_seed(config.seed, chain stream, chain_index).
[[nodiscard]] ChainOutput run_chain_output(const CountSeries& data, const PriorConfig& priors,
                                           const ChainConfig& config, std::span<const int> max_lags,
                                           std::size_t chain_index,
                                           KernelFamily family = KernelFamily::histogram);

[[nodiscard]] SampleTrace run_chain(const CountSeries& data, const PriorConfig& priors,
                                    const ChainConfig& config, std::span<const int> max_lags,
                                    std::size_t chain_index);

/// Continue a checkpointed chain up to config.iterations.
[[nodiscard]] ChainOutput resume_chain(const CountSeries& data, const PriorConfig& priors,
                                       const ChainConfig& config, const Checkpoint& checkpoint);

/// config.chains chains on config.workers threads; outputs in chain order.
/// A failing chain fails the run with its index in the message.
[[nodiscard]] std::vector<ChainOutput> run_chains(const CountSeries& data, const PriorConfig& priors,
                                                  const ChainConfig& config,
                                                  std::span<const int> max_lags,
                                                  KernelFamily family = KernelFamily::histogram);

/// Pooled post-burn-in draws of all chains, in chain-index order.
[[nodiscard]] SampleTrace run_parallel(const CountSeries& data, const PriorConfig& priors,
                                       const ChainConfig& config, std::span<const int> max_lags);

[[nodiscard]] SampleTrace fit_geometric(const CountSeries& data, const PriorConfig& priors,
                                        const ChainConfig& config, std::span<const int> max_lags);

}  // namespace dthp
