#include "dthp/chain.hpp"

#include "dthp/error.hpp"
#include "dthp/likelihood.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <thread>

namespace dthp {
namespace {

SeedStream stream_for(KernelFamily family) {
    return family == KernelFamily::histogram ? SeedStream::chain : SeedStream::geometric_chain;
}

std::unique_ptr<SamplerBase> make_sampler(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                                          const PriorConfig& priors, const ChainConfig& config,
                                          std::span<const int> max_lags, std::uint64_t seed,
                                          KernelFamily family) {
    if (family == KernelFamily::histogram) {
        return std::make_unique<HistogramSampler>(data, std::move(cache), priors, config, max_lags, seed);
    }
    return std::make_unique<GeometricSampler>(data, std::move(cache), priors, config, max_lags, seed);
}

ChainOutput finish(const SamplerBase& sampler, std::vector<Draw> draws, std::size_t chain_index,
                   std::uint64_t seed, std::size_t dims) {
    ChainOutput out;
    out.trace.dims = dims;
    out.trace.family = sampler.family();
    out.trace.counters = sampler.state().counters;
    out.trace.chains.push_back(ChainRecord{chain_index, seed, 0, draws.size(), sampler.state().counters});
    out.trace.draws = std::move(draws);
    out.final_state = sampler.checkpoint(chain_index, seed);
    return out;
}

ChainOutput run_one(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                    const PriorConfig& priors, const ChainConfig& config, std::span<const int> lags,
                    std::size_t chain_index, KernelFamily family) {
    const std::uint64_t seed = derive_seed(config.seed, stream_for(family), chain_index);
    auto sampler = make_sampler(data, std::move(cache), priors, config, lags, seed, family);
    std::vector<Draw> draws;
    draws.reserve(config.expected_draws());
    sampler->run_until(config.iterations, draws);
    return finish(*sampler, std::move(draws), chain_index, seed, data.dims());
}

}  // namespace

std::vector<int> expand_max_lags(std::span<const int> max_lags, std::size_t dims) {
    std::vector<int> out;
    if (max_lags.size() == 1) {
        out.assign(dims * dims, max_lags[0]);
    } else if (max_lags.size() == dims * dims) {
        out.assign(max_lags.begin(), max_lags.end());
    } else {
        throw Error(ErrorKind::dimension_mismatch, "max_lags needs 1 or " + std::to_string(dims * dims) +
                                                       " entries, got " + std::to_string(max_lags.size()));
    }
    for (int s : out) {
        if (s < 1) {
            throw Error(ErrorKind::config, "every maximum lag must be >= 1");
        }
    }
    return out;
}

ChainOutput run_chain_output(const CountSeries& data, const PriorConfig& priors, const ChainConfig& config,
                             std::span<const int> max_lags, std::size_t chain_index, KernelFamily family) {
    config.validate();
    const auto lags = expand_max_lags(max_lags, data.dims());
    auto cache = std::make_shared<const LagCountCache>(data, *std::max_element(lags.begin(), lags.end()));
    return run_one(data, std::move(cache), priors, config, lags, chain_index, family);
}

SampleTrace run_chain(const CountSeries& data, const PriorConfig& priors, const ChainConfig& config,
                      std::span<const int> max_lags, std::size_t chain_index) {
    return run_chain_output(data, priors, config, max_lags, chain_index).trace;
}

ChainOutput resume_chain(const CountSeries& data, const PriorConfig& priors, const ChainConfig& config,
                         const Checkpoint& checkpoint) {
    config.validate();
    require_compatible(checkpoint.model, data);
    if (checkpoint.iteration > config.iterations) {
        throw Error(ErrorKind::config, "checkpoint is already past the requested iteration count");
    }
    auto cache = std::make_shared<const LagCountCache>(data, checkpoint.model.max_lag());
    std::unique_ptr<SamplerBase> sampler;
    if (checkpoint.family == KernelFamily::histogram) {
        sampler = std::make_unique<HistogramSampler>(data, cache, priors, config, checkpoint);
    } else {
        sampler = std::make_unique<GeometricSampler>(data, cache, priors, config, checkpoint);
    }
    std::vector<Draw> draws;
    sampler->run_until(config.iterations, draws);
    return finish(*sampler, std::move(draws), checkpoint.chain_index, checkpoint.seed, data.dims());
}

std::vector<ChainOutput> run_chains(const CountSeries& data, const PriorConfig& priors,
                                    const ChainConfig& config, std::span<const int> max_lags,
                                    KernelFamily family) {
    config.validate();
    const auto lags = expand_max_lags(max_lags, data.dims());
    auto cache = std::make_shared<const LagCountCache>(data, *std::max_element(lags.begin(), lags.end()));

    std::size_t workers = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                              : config.workers;
    workers = std::min(workers, config.chains);

    std::vector<ChainOutput> outputs(config.chains);
    std::vector<std::exception_ptr> failures(config.chains);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t c = next++; c < config.chains; c = next++) {
            try {
                outputs[c] = run_one(data, cache, priors, config, lags, c, family);
            } catch (...) {
                failures[c] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    for (std::size_t c = 0; c < config.chains; ++c) {
        if (!failures[c]) {
            continue;
        }
        try {
            std::rethrow_exception(failures[c]);
        } catch (const Error& e) {
            throw Error(e.kind(), "chain " + std::to_string(c) + ": " + e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorKind::numerical, "chain " + std::to_string(c) + ": " + e.what());
        }
    }
    return outputs;
}

namespace {

SampleTrace pooled(std::vector<ChainOutput> outputs) {
    std::vector<SampleTrace> traces;
    traces.reserve(outputs.size());
    for (auto& o : outputs) {
        traces.push_back(std::move(o.trace));
    }
    return pool(traces);
}

}  // namespace

SampleTrace run_parallel(const CountSeries& data, const PriorConfig& priors, const ChainConfig& config,
                         std::span<const int> max_lags) {
    return pooled(run_chains(data, priors, config, max_lags, KernelFamily::histogram));
}

SampleTrace fit_geometric(const CountSeries& data, const PriorConfig& priors, const ChainConfig& config,
                          std::span<const int> max_lags) {
    return pooled(run_chains(data, priors, config, max_lags, KernelFamily::geometric));
}

}  // namespace dthp
