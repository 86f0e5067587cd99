#pragma once

#include "dthp/count_series.hpp"
#include "dthp/model.hpp"

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace dthp {

/// Poisson log-mass y log(lambda) - lambda - log(y!) with log(y!) supplied.
[[nodiscard]] inline double poisson_log_mass(double count, double lambda, double log_factorial) noexcept {
    return (count > 0.0 ? count * std::log(lambda) : 0.0) - lambda - log_factorial;
}

/// Lagged-count table C[t][l][d-1] = y^l_{t-d} for d <= min(t, max_lag), 0
/// otherwise (t 0-based). With it, the excitation of pair (l, k) at t is a
/// dense dot product with the kernel masses.
class LagCountCache {
public:
    LagCountCache(const CountSeries& series, int max_lag);

    [[nodiscard]] std::size_t steps() const noexcept { return steps_; }
    [[nodiscard]] std::size_t dims() const noexcept { return dims_; }
    [[nodiscard]] int max_lag() const noexcept { return max_lag_; }

    [[nodiscard]] std::span<const double> lags(std::size_t t, std::size_t l) const {
        return {values_.data() + (t * dims_ + l) * static_cast<std::size_t>(max_lag_),
                static_cast<std::size_t>(max_lag_)};
    }
    [[nodiscard]] double at(std::size_t t, std::size_t l, int lag) const {
        return lags(t, l)[static_cast<std::size_t>(lag - 1)];
    }

private:
    std::size_t steps_;
    std::size_t dims_;
    int max_lag_;
    std::vector<double> values_;
};

[[nodiscard]] LagCountCache precompute_lag_counts(const CountSeries& series, int max_lag);

/// Full Poisson log-likelihood including the log(y!) constant. Throws
/// Error(numerical) when the result is not finite.
[[nodiscard]] double log_likelihood(const DthpModel& model, const CountSeries& series);
/// Same value through the lag-count cache; bit-identical to the uncached form.
[[nodiscard]] double log_likelihood(const DthpModel& model, const CountSeries& series,
                                    const LagCountCache& cache);

/// Per-dimension log(y!) table, row-major like CountSeries.
[[nodiscard]] std::vector<double> log_factorials(const CountSeries& series);

/// Incrementally maintained likelihood for samplers.
///
/// Holds the excitation sum_d C[t][l][d] g^{lk}(d) of every pair and the
/// log-likelihood of every dimension. A `try_*` call evaluates the total
/// log-likelihood under one changed parameter and stages it; `commit()`
/// adopts the staged change, and any later `try_*` discards it. Only the
/// target dimension of the change is recomputed. Values match a fresh
/// `log_likelihood` evaluation bit for bit.
class LikelihoodWorkspace {
public:
    LikelihoodWorkspace(const CountSeries& series, std::shared_ptr<const LagCountCache> cache,
                        const DthpModel& model);

    [[nodiscard]] double total() const noexcept { return total_; }
    [[nodiscard]] double dimension(std::size_t k) const { return per_dim_[k]; }

    double try_baseline(std::size_t k, double value);
    double try_magnitude(std::size_t l, std::size_t k, double value);
    double try_kernel(std::size_t l, std::size_t k, const Kernel& kernel);
    void commit();

    /// Recompute everything from `model`.
    void reset(const DthpModel& model);

private:
    enum class Staged { none, baseline, magnitude, kernel };

    void compute_excitation(std::size_t l, const Kernel& kernel, std::vector<double>& out) const;
    double dimension_ll(std::size_t k, double baseline, std::span<const double> magnitude_column,
                        std::size_t replaced_source, const std::vector<double>* replaced) const;
    double sum_with(std::size_t k, double value) const;

    const CountSeries* series_;
    std::shared_ptr<const LagCountCache> cache_;
    std::size_t dims_;
    std::size_t steps_;
    std::vector<double> log_factorials_;
    std::vector<double> baseline_;
    std::vector<double> magnitude_;  // row-major l*K+k
    std::vector<std::vector<double>> excitation_;  // per pair, length T
    std::vector<double> per_dim_;
    double total_ = 0.0;

    Staged staged_ = Staged::none;
    std::size_t staged_l_ = 0;
    std::size_t staged_k_ = 0;
    double staged_value_ = 0.0;
    double staged_dim_ll_ = 0.0;
    double staged_total_ = 0.0;
    std::vector<double> staged_excitation_;
    mutable std::vector<double> masses_scratch_;
};

}  // namespace dthp
