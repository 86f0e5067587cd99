#pragma once

#include "dthp/count_series.hpp"
#include "dthp/likelihood.hpp"
#include "dthp/model.hpp"
#include "dthp/prior.hpp"
#include "dthp/random.hpp"
#include "dthp/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dthp {

/// Random-walk variances on the log (logit for beta) scale.
struct StepVariances {
    double baseline = 0.1;
    double magnitude = 0.1;
    double height = 0.1;
    double rate = 0.1;

    bool operator==(const StepVariances&) const = default;
};

struct ChainConfig {
    std::uint64_t iterations = 60000;
    std::uint64_t burn_in = 30000;
    std::size_t chains = 3;
    std::uint64_t thin = 1;
    StepVariances steps;
    /// p_b for 1 < J < s_max; p_b = 1 at J = 1 and p_d = 1 at J = s_max.
    double birth_probability = 0.5;
    /// Variance of the Normal(m, v) birth-height proposal.
    double birth_height_variance = 0.1;
    std::uint64_t seed = 1;
    /// Worker threads for parallel chains; 0 = hardware concurrency.
    std::size_t workers = 0;
    /// Replace the likelihood by a constant (prior-recovery mode).
    bool constant_likelihood = false;
    /// Compare cached and fresh log-likelihood after every sweep.
    bool debug_checks = false;
    std::size_t max_init_retries = 100;

    void validate() const;
    [[nodiscard]] std::uint64_t expected_draws() const noexcept {
        return iterations > burn_in ? (iterations - burn_in) / thin : 0;
    }

    bool operator==(const ChainConfig&) const = default;
};

/// Everything a chain needs to resume bit-identically.
struct Checkpoint {
    static constexpr int format_version = 1;

    KernelFamily family = KernelFamily::histogram;
    std::size_t chain_index = 0;
    std::uint64_t seed = 0;
    std::uint64_t iteration = 0;
    DthpModel model;
    MoveCounters counters;
    std::string rng_state;

    bool operator==(const Checkpoint&) const = default;
};

struct McmcState {
    DthpModel model;
    std::uint64_t iteration = 0;
    MoveCounters counters;
    Rng rng;
};

/// Proposal-probability terms of a birth from J = x to x + 1 and its reverse death.
struct BirthTerms {
    double birth_move_probability;   ///< p_b at J = x
    double death_move_probability;   ///< p_d at J = x + 1
    double position_probability;     ///< 1 / (s_max - x)
    double removal_probability;      ///< 1 / x
};

[[nodiscard]] double birth_move_probability(std::size_t components, int max_lag, double base);
[[nodiscard]] BirthTerms birth_terms(std::size_t components, int max_lag, double base);

struct BirthDeathOutcome {
    MoveKind kind = MoveKind::birth;
    bool attempted = false;
    bool accepted = false;
    bool support_violation = false;  ///< birth height drawn <= 0
    double log_acceptance = 0.0;
};

/// Shared machinery: state, cached likelihood and the static-parameter moves.
class SamplerBase {
public:
    SamplerBase(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                const PriorConfig& priors, const ChainConfig& config, McmcState state);
    virtual ~SamplerBase() = default;
    SamplerBase(const SamplerBase&) = delete;
    SamplerBase& operator=(const SamplerBase&) = delete;

    virtual void sweep() = 0;
    [[nodiscard]] virtual KernelFamily family() const noexcept = 0;

    /// Log-scale random walk on mu^k.
    bool update_baseline(std::size_t k);
    bool update_baseline(std::size_t k, double step_variance);
    /// Log-scale random walk on alpha^{lk}.
    bool update_magnitude(std::size_t l, std::size_t k);
    bool update_magnitude(std::size_t l, std::size_t k, double step_variance);

    [[nodiscard]] const McmcState& state() const noexcept { return state_; }
    [[nodiscard]] const DthpModel& model() const noexcept { return state_.model; }
    /// Cached value (0 in constant-likelihood mode).
    [[nodiscard]] double log_likelihood() const noexcept { return log_likelihood_; }
    [[nodiscard]] double fresh_log_likelihood() const;

    [[nodiscard]] Draw snapshot() const;
    [[nodiscard]] Checkpoint checkpoint(std::size_t chain_index, std::uint64_t seed) const;

    /// Run sweeps until `state().iteration == until`, appending draws per the
    /// burn-in/thinning rule of the config.
    void run_until(std::uint64_t until, std::vector<Draw>& draws);

protected:
    /// Target log-likelihood after a staged workspace change.
    double staged_log_likelihood(double staged_total) const noexcept;
    bool accept(double log_ratio);
    void after_sweep();
    MoveCounter& counter(MoveKind kind) { return state_.counters[kind]; }

    const CountSeries& data_;
    std::shared_ptr<const LagCountCache> cache_;
    PriorConfig priors_;
    ChainConfig config_;
    McmcState state_;
    LikelihoodWorkspace workspace_;
    double log_likelihood_ = 0.0;
};

/// Reversible-jump sampler over random-histogram kernels.
class HistogramSampler final : public SamplerBase {
public:
    /// Fresh chain: flat J = 1 kernels with the given per-pair maximum lags,
    /// mu and alpha drawn from the prior (redrawn while the likelihood is not
    /// finite, up to config.max_init_retries).
    HistogramSampler(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                     const PriorConfig& priors, const ChainConfig& config,
                     std::span<const int> max_lags, std::uint64_t seed);
    HistogramSampler(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                     const PriorConfig& priors, const ChainConfig& config, const Checkpoint& checkpoint);

    /// One-at-a-time log-scale random walk on every free height of pair (l, k).
    void update_heights(std::size_t l, std::size_t k);
    void update_heights(std::size_t l, std::size_t k, double step_variance);
    /// Move one uniformly chosen interior knot to a vacant adjacent integer.
    bool shift_knot(std::size_t l, std::size_t k);
    BirthDeathOutcome birth_death(std::size_t l, std::size_t k);

    /// For each k: mu^k. For each pair: alpha, heights, knot shift. Then one
    /// birth-death attempt per pair.
    void sweep() override;
    [[nodiscard]] KernelFamily family() const noexcept override { return KernelFamily::histogram; }

    [[nodiscard]] const HistogramKernel& kernel(std::size_t l, std::size_t k) const;
    /// Replace a kernel outright (tests, warm starts). Refreshes caches.
    void set_kernel(std::size_t l, std::size_t k, const HistogramKernel& kernel);

private:
    double try_kernel(std::size_t pair, const HistogramKernel& kernel);
    void adopt_kernel(std::size_t pair, const HistogramKernel& kernel, double log_likelihood);
    /// log A for the birth (x -> x+1) between `smaller` and `larger`, excluding
    /// the likelihood ratio.
    double birth_log_ratio_without_likelihood(std::size_t pair, const HistogramKernel& smaller,
                                              const HistogramKernel& larger, double new_height) const;
};

/// Metropolis sampler for the truncated geometric kernel; beta moves on the
/// logit scale under a Uniform(0, 1) prior.
class GeometricSampler final : public SamplerBase {
public:
    GeometricSampler(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                     const PriorConfig& priors, const ChainConfig& config,
                     std::span<const int> max_lags, std::uint64_t seed);
    GeometricSampler(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                     const PriorConfig& priors, const ChainConfig& config, const Checkpoint& checkpoint);

    bool update_rate(std::size_t l, std::size_t k);
    void sweep() override;
    [[nodiscard]] KernelFamily family() const noexcept override { return KernelFamily::geometric; }
};

}  // namespace dthp
