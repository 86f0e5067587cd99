#include "dthp/sampler.hpp"

#include "dthp/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dthp {
namespace {

constexpr double cache_drift_tolerance = 1e-8;

double normal_log_pdf(double x, double mean, double variance) {
    const double z = x - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * variance) - z * z / (2.0 * variance);
}

/// Draw mu, alpha (and beta for geometric chains) from the prior with flat
/// J = 1 histograms, retrying while the likelihood is not finite.
McmcState initial_state(const CountSeries& data, const LagCountCache& cache, const PriorConfig& priors,
                        const ChainConfig& config, std::span<const int> max_lags, std::uint64_t seed,
                        KernelFamily family) {
    const std::size_t dims = data.dims();
    if (max_lags.size() != dims * dims) {
        throw Error(ErrorKind::invalid_argument, "need one maximum lag per kernel pair");
    }
    if (priors.dims() != dims) {
        throw Error(ErrorKind::dimension_mismatch, "prior dimension does not match the data");
    }
    McmcState state;
    state.rng = Rng(seed);
    std::string last_problem = "no attempt made";
    for (std::size_t attempt = 0; attempt <= config.max_init_retries; ++attempt) {
        DthpModel model;
        model.dims = dims;
        for (std::size_t k = 0; k < dims; ++k) {
            model.baseline.push_back(std::exp(priors.prior(ContinuousParam::baseline, k).draw(state.rng)));
        }
        for (std::size_t p = 0; p < dims * dims; ++p) {
            model.magnitude.push_back(std::exp(priors.prior(ContinuousParam::magnitude, p).draw(state.rng)));
        }
        try {
            for (std::size_t p = 0; p < dims * dims; ++p) {
                if (family == KernelFamily::histogram) {
                    model.kernels.emplace_back(HistogramKernel::flat(max_lags[p]));
                } else {
                    model.kernels.emplace_back(GeometricKernel(uniform01(state.rng), max_lags[p]));
                }
            }
            model.validate();
            if (!config.constant_likelihood) {
                (void)log_likelihood(model, data, cache);
            }
            state.model = std::move(model);
            return state;
        } catch (const Error& e) {
            last_problem = e.what();
        }
    }
    throw Error(ErrorKind::numerical, "no valid initial state after " +
                                          std::to_string(config.max_init_retries + 1) +
                                          " prior draws: " + last_problem);
}

McmcState restored_state(const Checkpoint& checkpoint, KernelFamily family) {
    if (checkpoint.family != family) {
        throw Error(ErrorKind::invalid_argument, "checkpoint belongs to a different kernel family");
    }
    McmcState state;
    state.model = checkpoint.model;
    state.iteration = checkpoint.iteration;
    state.counters = checkpoint.counters;
    state.rng = load_rng(checkpoint.rng_state);
    return state;
}

}  // namespace

void ChainConfig::validate() const {
    if (iterations == 0) {
        throw Error(ErrorKind::config, "iterations must be >= 1");
    }
    if (burn_in >= iterations) {
        throw Error(ErrorKind::config, "burn_in must be smaller than iterations");
    }
    if (chains == 0) {
        throw Error(ErrorKind::config, "need at least one chain");
    }
    if (thin == 0) {
        throw Error(ErrorKind::config, "thin must be >= 1");
    }
    if (!(birth_probability >= 0.0 && birth_probability <= 1.0)) {
        throw Error(ErrorKind::config, "birth_probability must lie in [0, 1]");
    }
    for (double v : {steps.baseline, steps.magnitude, steps.height, steps.rate, birth_height_variance}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::config, "proposal variances must be finite and non-negative");
        }
    }
    if (!(birth_height_variance > 0.0)) {
        throw Error(ErrorKind::config, "birth_height_variance must be positive");
    }
}

double birth_move_probability(std::size_t components, int max_lag, double base) {
    const auto s = static_cast<std::size_t>(max_lag);
    if (components >= s) {
        return 0.0;
    }
    if (components <= 1) {
        return 1.0;
    }
    return base;
}

BirthTerms birth_terms(std::size_t components, int max_lag, double base) {
    const auto s = static_cast<std::size_t>(max_lag);
    if (components < 1 || components >= s) {
        throw Error(ErrorKind::invalid_argument, "no birth possible from J = " + std::to_string(components));
    }
    return BirthTerms{
        .birth_move_probability = birth_move_probability(components, max_lag, base),
        .death_move_probability = 1.0 - birth_move_probability(components + 1, max_lag, base),
        .position_probability = 1.0 / static_cast<double>(s - components),
        .removal_probability = 1.0 / static_cast<double>(components),
    };
}

// ---------------------------------------------------------------------------
// SamplerBase

SamplerBase::SamplerBase(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                         const PriorConfig& priors, const ChainConfig& config, McmcState state)
    : data_(data),
      cache_(std::move(cache)),
      priors_(priors),
      config_(config),
      state_(std::move(state)),
      workspace_(data_, cache_, state_.model) {
    log_likelihood_ = config_.constant_likelihood ? 0.0 : workspace_.total();
}

double SamplerBase::fresh_log_likelihood() const {
    return config_.constant_likelihood ? 0.0 : dthp::log_likelihood(state_.model, data_, *cache_);
}

double SamplerBase::staged_log_likelihood(double staged_total) const noexcept {
    return config_.constant_likelihood ? 0.0 : staged_total;
}

bool SamplerBase::accept(double log_ratio) {
    if (std::isnan(log_ratio)) {
        return false;
    }
    if (log_ratio >= 0.0) {
        return true;
    }
    return std::log(uniform01(state_.rng)) < log_ratio;
}

bool SamplerBase::update_baseline(std::size_t k) { return update_baseline(k, config_.steps.baseline); }

bool SamplerBase::update_baseline(std::size_t k, double step_variance) {
    auto& count = counter(MoveKind::baseline);
    ++count.attempted;
    const double current = state_.model.baseline[k];
    const double step = std::sqrt(step_variance) * standard_normal(state_.rng);
    const double proposal = current * std::exp(step);
    if (!(proposal > 0.0) || !std::isfinite(proposal)) {
        return false;
    }
    const double log_current = std::log(current);
    const double prior_diff = priors_.log_prior_continuous(ContinuousParam::baseline, k, log_current + step) -
                              priors_.log_prior_continuous(ContinuousParam::baseline, k, log_current);
    if (!std::isfinite(prior_diff)) {
        return false;
    }
    const double new_ll =
        config_.constant_likelihood ? 0.0 : staged_log_likelihood(workspace_.try_baseline(k, proposal));
    if (!std::isfinite(new_ll) || !accept(new_ll - log_likelihood_ + prior_diff)) {
        return false;
    }
    state_.model.baseline[k] = proposal;
    if (!config_.constant_likelihood) {
        workspace_.commit();
    }
    log_likelihood_ = new_ll;
    ++count.accepted;
    return true;
}

bool SamplerBase::update_magnitude(std::size_t l, std::size_t k) {
    return update_magnitude(l, k, config_.steps.magnitude);
}

bool SamplerBase::update_magnitude(std::size_t l, std::size_t k, double step_variance) {
    auto& count = counter(MoveKind::magnitude);
    ++count.attempted;
    const std::size_t pair = state_.model.pair(l, k);
    const double current = state_.model.magnitude[pair];
    const double step = std::sqrt(step_variance) * standard_normal(state_.rng);
    const double proposal = current * std::exp(step);
    if (!(proposal > 0.0) || !std::isfinite(proposal)) {
        return false;
    }
    const double log_current = std::log(current);
    const double prior_diff =
        priors_.log_prior_continuous(ContinuousParam::magnitude, pair, log_current + step) -
        priors_.log_prior_continuous(ContinuousParam::magnitude, pair, log_current);
    if (!std::isfinite(prior_diff)) {
        return false;
    }
    const double new_ll = config_.constant_likelihood
                              ? 0.0
                              : staged_log_likelihood(workspace_.try_magnitude(l, k, proposal));
    if (!std::isfinite(new_ll) || !accept(new_ll - log_likelihood_ + prior_diff)) {
        return false;
    }
    state_.model.magnitude[pair] = proposal;
    if (!config_.constant_likelihood) {
        workspace_.commit();
    }
    log_likelihood_ = new_ll;
    ++count.accepted;
    return true;
}

void SamplerBase::after_sweep() {
    ++state_.iteration;
    if (config_.debug_checks && !config_.constant_likelihood) {
        const double fresh = fresh_log_likelihood();
        if (!(std::abs(fresh - log_likelihood_) < cache_drift_tolerance)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "cached log-likelihood " << log_likelihood_ << " drifted from fresh value " << fresh
                << " at iteration " << state_.iteration;
            throw Error(ErrorKind::numerical, msg.str());
        }
    }
}

Draw SamplerBase::snapshot() const {
    return Draw{state_.iteration, log_likelihood_, state_.model.baseline, state_.model.magnitude,
                state_.model.kernels};
}

Checkpoint SamplerBase::checkpoint(std::size_t chain_index, std::uint64_t seed) const {
    return Checkpoint{family(), chain_index, seed, state_.iteration, state_.model, state_.counters,
                      save_rng(state_.rng)};
}

void SamplerBase::run_until(std::uint64_t until, std::vector<Draw>& draws) {
    while (state_.iteration < until) {
        sweep();
        const std::uint64_t it = state_.iteration;
        if (it > config_.burn_in && (it - config_.burn_in) % config_.thin == 0) {
            draws.push_back(snapshot());
        }
    }
}

// ---------------------------------------------------------------------------
// HistogramSampler

HistogramSampler::HistogramSampler(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                                   const PriorConfig& priors, const ChainConfig& config,
                                   std::span<const int> max_lags, std::uint64_t seed)
    : SamplerBase(data, cache, priors, config,
                  initial_state(data, *cache, priors, config, max_lags, seed, KernelFamily::histogram)) {}

HistogramSampler::HistogramSampler(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                                   const PriorConfig& priors, const ChainConfig& config,
                                   const Checkpoint& checkpoint)
    : SamplerBase(data, std::move(cache), priors, config,
                  restored_state(checkpoint, KernelFamily::histogram)) {
    for (const auto& kernel : state_.model.kernels) {
        if (!std::holds_alternative<HistogramKernel>(kernel)) {
            throw Error(ErrorKind::invalid_argument, "histogram checkpoint holds a non-histogram kernel");
        }
    }
}

const HistogramKernel& HistogramSampler::kernel(std::size_t l, std::size_t k) const {
    return std::get<HistogramKernel>(state_.model.kernel(l, k));
}

void HistogramSampler::set_kernel(std::size_t l, std::size_t k, const HistogramKernel& kernel) {
    state_.model.kernels[state_.model.pair(l, k)] = kernel;
    workspace_.reset(state_.model);
    log_likelihood_ = config_.constant_likelihood ? 0.0 : workspace_.total();
}

double HistogramSampler::try_kernel(std::size_t pair, const HistogramKernel& kernel) {
    if (config_.constant_likelihood) {
        return 0.0;
    }
    const std::size_t dims = state_.model.dims;
    return workspace_.try_kernel(pair / dims, pair % dims, kernel);
}

void HistogramSampler::adopt_kernel(std::size_t pair, const HistogramKernel& kernel, double log_likelihood) {
    state_.model.kernels[pair] = kernel;
    if (!config_.constant_likelihood) {
        workspace_.commit();
    }
    log_likelihood_ = log_likelihood;
}

void HistogramSampler::update_heights(std::size_t l, std::size_t k) {
    update_heights(l, k, config_.steps.height);
}

void HistogramSampler::update_heights(std::size_t l, std::size_t k, double step_variance) {
    const std::size_t pair = state_.model.pair(l, k);
    auto& count = counter(MoveKind::height);
    if (kernel(l, k).components() == 1) {
        ++count.skipped;
        return;
    }
    const double sd = std::sqrt(step_variance);
    for (std::size_t j = 1; j < kernel(l, k).components(); ++j) {
        ++count.attempted;
        const HistogramKernel& current = kernel(l, k);
        const double height = current.heights()[j];
        const double step = sd * standard_normal(state_.rng);
        const double proposal = height * std::exp(step);
        if (!(proposal > 0.0) || !std::isfinite(proposal)) {
            continue;
        }
        const double log_height = std::log(height);
        const double prior_diff =
            priors_.log_prior_continuous(ContinuousParam::height, pair, log_height + step) -
            priors_.log_prior_continuous(ContinuousParam::height, pair, log_height);
        if (!std::isfinite(prior_diff)) {
            continue;
        }
        HistogramKernel candidate = current.with_free_height(j, proposal);
        const double new_ll = try_kernel(pair, candidate);
        if (!std::isfinite(new_ll) || !accept(new_ll - log_likelihood_ + prior_diff)) {
            continue;
        }
        adopt_kernel(pair, candidate, new_ll);
        ++count.accepted;
    }
}

bool HistogramSampler::shift_knot(std::size_t l, std::size_t k) {
    const std::size_t pair = state_.model.pair(l, k);
    auto& count = counter(MoveKind::knot_shift);
    const HistogramKernel& current = kernel(l, k);
    const std::size_t interior = current.components() - 1;
    if (interior == 0) {
        ++count.skipped;
        return false;
    }
    const auto knots = current.knots();
    const std::size_t j = uniform_index(state_.rng, interior) + 1;
    const auto vacant_around = [](std::span<const int> s, std::size_t idx) {
        return static_cast<std::size_t>(s[idx + 1] - s[idx - 1] - 2);
    };
    const std::size_t n_vacant = vacant_around(knots, j);
    if (n_vacant == 0) {
        ++count.skipped;
        return false;
    }
    ++count.attempted;
    int position = knots[j - 1] + 1 + static_cast<int>(uniform_index(state_.rng, n_vacant));
    if (position >= knots[j]) {
        ++position;
    }
    HistogramKernel candidate = current.with_knot_moved(j, position);
    const std::size_t n_vacant_reverse = vacant_around(candidate.knots(), j);
    const double prior_diff =
        priors_.log_prior_structure(candidate.components(), candidate.knots(), candidate.max_lag()) -
        priors_.log_prior_structure(current.components(), current.knots(), current.max_lag());
    const double proposal_ratio =
        std::log(static_cast<double>(n_vacant)) - std::log(static_cast<double>(n_vacant_reverse));
    const double new_ll = try_kernel(pair, candidate);
    if (!std::isfinite(new_ll) || !accept(new_ll - log_likelihood_ + prior_diff + proposal_ratio)) {
        return false;
    }
    adopt_kernel(pair, candidate, new_ll);
    ++count.accepted;
    return true;
}

double HistogramSampler::birth_log_ratio_without_likelihood(std::size_t pair,
                                                            const HistogramKernel& smaller,
                                                            const HistogramKernel& larger,
                                                            double new_height) const {
    const std::size_t x = smaller.components();
    const int s_max = smaller.max_lag();
    const BirthTerms terms = birth_terms(x, s_max, config_.birth_probability);
    const double proposal_density =
        normal_log_pdf(new_height, gamma_avg(smaller), config_.birth_height_variance);
    const double prior_diff = priors_.log_prior_structure(x + 1, larger.knots(), s_max) -
                              priors_.log_prior_structure(x, smaller.knots(), s_max) +
                              priors_.log_prior_height_natural(pair, new_height);
    return std::log(terms.death_move_probability) + std::log(terms.removal_probability) -
           std::log(terms.birth_move_probability) - std::log(terms.position_probability) -
           proposal_density + prior_diff;
}

BirthDeathOutcome HistogramSampler::birth_death(std::size_t l, std::size_t k) {
    const std::size_t pair = state_.model.pair(l, k);
    const HistogramKernel current = kernel(l, k);
    const std::size_t components = current.components();
    const int s_max = current.max_lag();
    BirthDeathOutcome outcome;
    if (s_max == 1) {
        ++counter(MoveKind::birth).skipped;
        return outcome;
    }
    const double p_birth = birth_move_probability(components, s_max, config_.birth_probability);
    const bool birth = uniform01(state_.rng) < p_birth;
    outcome.attempted = true;

    if (birth) {
        outcome.kind = MoveKind::birth;
        auto& count = counter(MoveKind::birth);
        ++count.attempted;
        const std::vector<int> vacant = current.vacant_positions();
        const int position = vacant[uniform_index(state_.rng, vacant.size())];
        const double height =
            gamma_avg(current) + std::sqrt(config_.birth_height_variance) * standard_normal(state_.rng);
        if (!(height > 0.0)) {
            outcome.support_violation = true;
            outcome.log_acceptance = -std::numeric_limits<double>::infinity();
            return outcome;
        }
        HistogramKernel larger = current.with_knot_inserted(position, height);
        const double new_ll = try_kernel(pair, larger);
        outcome.log_acceptance =
            birth_log_ratio_without_likelihood(pair, current, larger, height) + (new_ll - log_likelihood_);
        if (std::isfinite(new_ll) && accept(outcome.log_acceptance)) {
            adopt_kernel(pair, larger, new_ll);
            ++count.accepted;
            outcome.accepted = true;
        }
        return outcome;
    }

    outcome.kind = MoveKind::death;
    auto& count = counter(MoveKind::death);
    ++count.attempted;
    const std::size_t j = uniform_index(state_.rng, components - 1) + 1;
    const double removed_height = current.heights()[j];
    HistogramKernel smaller = current.with_knot_removed(j);
    const double new_ll = try_kernel(pair, smaller);
    outcome.log_acceptance = -birth_log_ratio_without_likelihood(pair, smaller, current, removed_height) +
                             (new_ll - log_likelihood_);
    if (std::isfinite(new_ll) && accept(outcome.log_acceptance)) {
        adopt_kernel(pair, smaller, new_ll);
        ++count.accepted;
        outcome.accepted = true;
    }
    return outcome;
}

void HistogramSampler::sweep() {
    const std::size_t dims = state_.model.dims;
    for (std::size_t k = 0; k < dims; ++k) {
        update_baseline(k);
        for (std::size_t l = 0; l < dims; ++l) {
            update_magnitude(l, k);
            update_heights(l, k);
            shift_knot(l, k);
        }
    }
    for (std::size_t k = 0; k < dims; ++k) {
        for (std::size_t l = 0; l < dims; ++l) {
            (void)birth_death(l, k);
        }
    }
    after_sweep();
}

// ---------------------------------------------------------------------------
// GeometricSampler

GeometricSampler::GeometricSampler(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                                   const PriorConfig& priors, const ChainConfig& config,
                                   std::span<const int> max_lags, std::uint64_t seed)
    : SamplerBase(data, cache, priors, config,
                  initial_state(data, *cache, priors, config, max_lags, seed, KernelFamily::geometric)) {}

GeometricSampler::GeometricSampler(const CountSeries& data, std::shared_ptr<const LagCountCache> cache,
                                   const PriorConfig& priors, const ChainConfig& config,
                                   const Checkpoint& checkpoint)
    : SamplerBase(data, std::move(cache), priors, config,
                  restored_state(checkpoint, KernelFamily::geometric)) {
    for (const auto& kernel : state_.model.kernels) {
        if (!std::holds_alternative<GeometricKernel>(kernel)) {
            throw Error(ErrorKind::invalid_argument, "geometric checkpoint holds a non-geometric kernel");
        }
    }
}

bool GeometricSampler::update_rate(std::size_t l, std::size_t k) {
    auto& count = counter(MoveKind::rate);
    ++count.attempted;
    const std::size_t pair = state_.model.pair(l, k);
    const auto& current = std::get<GeometricKernel>(state_.model.kernels[pair]);
    const double beta = current.beta();
    const double logit = std::log(beta) - std::log1p(-beta);
    const double proposed_logit = logit + std::sqrt(config_.steps.rate) * standard_normal(state_.rng);
    const double proposal = 1.0 / (1.0 + std::exp(-proposed_logit));
    if (!(proposal > 0.0 && proposal < 1.0)) {
        return false;
    }
    // Uniform(0,1) prior on beta; on the logit scale the target picks up the
    // Jacobian beta (1 - beta).
    const auto log_jacobian = [](double eta) { return -std::log1p(std::exp(-eta)) - std::log1p(std::exp(eta)); };
    const double prior_diff = log_jacobian(proposed_logit) - log_jacobian(logit);
    GeometricKernel candidate(proposal, current.max_lag());
    const double new_ll =
        config_.constant_likelihood ? 0.0 : staged_log_likelihood(workspace_.try_kernel(l, k, candidate));
    if (!std::isfinite(new_ll) || !accept(new_ll - log_likelihood_ + prior_diff)) {
        return false;
    }
    state_.model.kernels[pair] = candidate;
    if (!config_.constant_likelihood) {
        workspace_.commit();
    }
    log_likelihood_ = new_ll;
    ++count.accepted;
    return true;
}

void GeometricSampler::sweep() {
    const std::size_t dims = state_.model.dims;
    for (std::size_t k = 0; k < dims; ++k) {
        update_baseline(k);
        for (std::size_t l = 0; l < dims; ++l) {
            update_magnitude(l, k);
            update_rate(l, k);
        }
    }
    after_sweep();
}

}  // namespace dthp
