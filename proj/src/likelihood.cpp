#include "dthp/likelihood.hpp"

#include "dthp/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace dthp {
namespace {

double log_factorial(double count) { return boost::math::lgamma(count + 1.0); }

void require_finite(double value) {
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::numerical,
                    "log-likelihood is not finite (" + std::to_string(value) + "); invalid parameters");
    }
}

}  // namespace

LagCountCache::LagCountCache(const CountSeries& series, int max_lag)
    : steps_(series.steps()), dims_(series.dims()), max_lag_(max_lag) {
    if (max_lag < 1) {
        throw Error(ErrorKind::invalid_argument, "lag cache needs max_lag >= 1");
    }
    const auto width = static_cast<std::size_t>(max_lag);
    values_.assign(steps_ * dims_ * width, 0.0);
    for (std::size_t t = 0; t < steps_; ++t) {
        for (std::size_t l = 0; l < dims_; ++l) {
            double* row = values_.data() + (t * dims_ + l) * width;
            const std::size_t reach = std::min(t, width);
            for (std::size_t d = 1; d <= reach; ++d) {
                row[d - 1] = series.at(l, t - d);
            }
        }
    }
}

LagCountCache precompute_lag_counts(const CountSeries& series, int max_lag) {
    return LagCountCache(series, max_lag);
}

std::vector<double> log_factorials(const CountSeries& series) {
    std::vector<double> out;
    out.reserve(series.dims() * series.steps());
    for (std::size_t k = 0; k < series.dims(); ++k) {
        for (double y : series.row(k)) {
            out.push_back(log_factorial(y));
        }
    }
    return out;
}

double log_likelihood(const DthpModel& model, const CountSeries& series) {
    require_compatible(model, series);
    model.validate();
    const std::size_t dims = model.dims;
    double total = 0.0;
    for (std::size_t k = 0; k < dims; ++k) {
        const auto counts = series.row(k);
        double dimension = 0.0;
        for (std::size_t t = 0; t < series.steps(); ++t) {
            double lambda = model.baseline[k];
            for (std::size_t l = 0; l < dims; ++l) {
                const Kernel& kernel = model.kernel(l, k);
                const auto history = series.row(l);
                const auto reach = std::min<std::size_t>(t, static_cast<std::size_t>(max_lag(kernel)));
                double excitation = 0.0;
                for (std::size_t d = 1; d <= reach; ++d) {
                    excitation += history[t - d] * evaluate(kernel, static_cast<int>(d));
                }
                lambda += model.alpha(l, k) * excitation;
            }
            dimension += poisson_log_mass(counts[t], lambda, log_factorial(counts[t]));
        }
        total += dimension;
    }
    require_finite(total);
    return total;
}

double log_likelihood(const DthpModel& model, const CountSeries& series, const LagCountCache& cache) {
    // Non-owning alias: the workspace only lives for this call.
    const std::shared_ptr<const LagCountCache> view(std::shared_ptr<const LagCountCache>(), &cache);
    const LikelihoodWorkspace workspace(series, view, model);
    require_finite(workspace.total());
    return workspace.total();
}

LikelihoodWorkspace::LikelihoodWorkspace(const CountSeries& series,
                                         std::shared_ptr<const LagCountCache> cache,
                                         const DthpModel& model)
    : series_(&series),
      cache_(std::move(cache)),
      dims_(series.dims()),
      steps_(series.steps()),
      log_factorials_(log_factorials(series)) {
    if (!cache_ || cache_->dims() != dims_ || cache_->steps() != steps_) {
        throw Error(ErrorKind::dimension_mismatch, "lag cache does not match the series");
    }
    reset(model);
}

void LikelihoodWorkspace::reset(const DthpModel& model) {
    require_compatible(model, *series_);
    model.validate();
    if (model.max_lag() > cache_->max_lag()) {
        throw Error(ErrorKind::invalid_argument,
                    "lag cache reaches " + std::to_string(cache_->max_lag()) + " days but the model needs " +
                        std::to_string(model.max_lag()));
    }
    baseline_ = model.baseline;
    magnitude_ = model.magnitude;
    excitation_.assign(dims_ * dims_, {});
    for (std::size_t l = 0; l < dims_; ++l) {
        for (std::size_t k = 0; k < dims_; ++k) {
            compute_excitation(l, model.kernel(l, k), excitation_[l * dims_ + k]);
        }
    }
    per_dim_.assign(dims_, 0.0);
    total_ = 0.0;
    for (std::size_t k = 0; k < dims_; ++k) {
        per_dim_[k] = dimension_ll(k, baseline_[k], {}, dims_, nullptr);
        total_ += per_dim_[k];
    }
    staged_ = Staged::none;
}

void LikelihoodWorkspace::compute_excitation(std::size_t l, const Kernel& kernel,
                                             std::vector<double>& out) const {
    const auto width = static_cast<std::size_t>(max_lag(kernel));
    masses_scratch_.resize(width);
    masses_into(kernel, masses_scratch_);
    const double* mass = masses_scratch_.data();
    out.resize(steps_);
    for (std::size_t t = 0; t < steps_; ++t) {
        const double* lagged = cache_->lags(t, l).data();
        double acc = 0.0;
        for (std::size_t d = 0; d < width; ++d) {
            acc += lagged[d] * mass[d];
        }
        out[t] = acc;
    }
}

double LikelihoodWorkspace::dimension_ll(std::size_t k, double baseline,
                                         std::span<const double> magnitude_column,
                                         std::size_t replaced_source,
                                         const std::vector<double>* replaced) const {
    const double* counts = series_->row(k).data();
    const double* log_fact = log_factorials_.data() + k * steps_;
    const auto alpha = [&](std::size_t l) {
        return magnitude_column.empty() ? magnitude_[l * dims_ + k] : magnitude_column[l];
    };
    double sum = 0.0;
    if (dims_ == 1) {
        const double a = alpha(0);
        const double* e = (replaced_source == 0 ? *replaced : excitation_[0]).data();
        for (std::size_t t = 0; t < steps_; ++t) {
            double lambda = baseline;
            lambda += a * e[t];
            sum += poisson_log_mass(counts[t], lambda, log_fact[t]);
        }
        return sum;
    }
    for (std::size_t t = 0; t < steps_; ++t) {
        double lambda = baseline;
        for (std::size_t l = 0; l < dims_; ++l) {
            const double e = l == replaced_source ? (*replaced)[t] : excitation_[l * dims_ + k][t];
            lambda += alpha(l) * e;
        }
        sum += poisson_log_mass(counts[t], lambda, log_fact[t]);
    }
    return sum;
}

double LikelihoodWorkspace::sum_with(std::size_t k, double value) const {
    double total = 0.0;
    for (std::size_t i = 0; i < dims_; ++i) {
        total += i == k ? value : per_dim_[i];
    }
    return total;
}

double LikelihoodWorkspace::try_baseline(std::size_t k, double value) {
    staged_ = Staged::baseline;
    staged_k_ = k;
    staged_value_ = value;
    staged_dim_ll_ = dimension_ll(k, value, {}, dims_, nullptr);
    staged_total_ = sum_with(k, staged_dim_ll_);
    return staged_total_;
}

double LikelihoodWorkspace::try_magnitude(std::size_t l, std::size_t k, double value) {
    staged_ = Staged::magnitude;
    staged_l_ = l;
    staged_k_ = k;
    staged_value_ = value;
    std::vector<double> column(dims_);
    for (std::size_t i = 0; i < dims_; ++i) {
        column[i] = i == l ? value : magnitude_[i * dims_ + k];
    }
    staged_dim_ll_ = dimension_ll(k, baseline_[k], column, dims_, nullptr);
    staged_total_ = sum_with(k, staged_dim_ll_);
    return staged_total_;
}

double LikelihoodWorkspace::try_kernel(std::size_t l, std::size_t k, const Kernel& kernel) {
    if (max_lag(kernel) > cache_->max_lag()) {
        throw Error(ErrorKind::invalid_argument, "kernel reaches beyond the lag cache");
    }
    staged_ = Staged::kernel;
    staged_l_ = l;
    staged_k_ = k;
    compute_excitation(l, kernel, staged_excitation_);
    staged_dim_ll_ = dimension_ll(k, baseline_[k], {}, l, &staged_excitation_);
    staged_total_ = sum_with(k, staged_dim_ll_);
    return staged_total_;
}

void LikelihoodWorkspace::commit() {
    switch (staged_) {
        case Staged::none:
            return;
        case Staged::baseline:
            baseline_[staged_k_] = staged_value_;
            break;
        case Staged::magnitude:
            magnitude_[staged_l_ * dims_ + staged_k_] = staged_value_;
            break;
        case Staged::kernel:
            excitation_[staged_l_ * dims_ + staged_k_].swap(staged_excitation_);
            break;
    }
    per_dim_[staged_k_] = staged_dim_ll_;
    total_ = staged_total_;
    staged_ = Staged::none;
}

}  // namespace dthp
