#pragma once

// Reference implementations used only by tests. They deliberately avoid the
// library's own evaluation paths so agreement is meaningful.

#include "dthp/count_series.hpp"
#include "dthp/kernel.hpp"
#include "dthp/model.hpp"
#include "dthp/random.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

/// Kernel mass at `lag`, found by scanning the knots and summing the
/// normalizer over every integer lag.
double kernel_mass(const dthp::Kernel& kernel, int lag);

/// Direct triple loop: re-sums the whole history for every (k, t).
double naive_log_likelihood(const dthp::DthpModel& model, const dthp::CountSeries& series);

/// lambda^k(t) with 0-based t, recomputed from scratch.
double naive_intensity(const dthp::DthpModel& model, const dthp::CountSeries& series, std::size_t t,
                       std::size_t k);

/// Random valid histogram: J uniform on 1..s_max, knots a uniform subset,
/// free heights log-uniform on [e^-5, e^5].
dthp::HistogramKernel random_histogram(dthp::Rng& rng, int max_lag);

dthp::DthpModel random_model(dthp::Rng& rng, std::size_t dims, int max_lag);
dthp::CountSeries random_series(dthp::Rng& rng, std::size_t dims, std::size_t steps, int max_count);

double normal_cdf(double x, double mean = 0.0, double variance = 1.0);

/// Kolmogorov-Smirnov statistic of `sample` against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Asymptotic p-value of D for an effective sample size n.
double kolmogorov_pvalue(double d, double n);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

/// Autocorrelation-adjusted sample size (initial positive sequence).
double effective_size(std::span<const double> x);

/// All increasing knot vectors 0 = s_0 < ... < s_J = max_lag.
std::vector<std::vector<int>> knot_configurations(int max_lag, std::size_t components);

}  // namespace oracle
