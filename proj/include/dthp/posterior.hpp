#pragma once

#include "dthp/count_series.hpp"
#include "dthp/kernel.hpp"
#include "dthp/trace.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dthp {

/// Linear interpolation between order statistics (the "type 7" rule):
/// h = (n-1) p, q = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
/// `sorted` must be ascending and non-empty.
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double p);
[[nodiscard]] double quantile(std::vector<double> values, double p);

/// Posterior summary of one scalar: mean, median and the 80% interval.
struct BandPoint {
    double mean = 0.0;
    double median = 0.0;
    double lower = 0.0;  ///< 10% quantile
    double upper = 0.0;  ///< 90% quantile

    bool operator==(const BandPoint&) const = default;
};

[[nodiscard]] BandPoint summarize(std::vector<double> values);

struct KernelBand {
    std::vector<BandPoint> lags;  ///< element d-1 is lag d

    [[nodiscard]] bool contains(std::span<const double> truth) const;
    [[nodiscard]] std::size_t lags_covered(std::span<const double> truth) const;
};

[[nodiscard]] KernelBand kernel_band(const SampleTrace& trace, std::size_t l, std::size_t k);

/// sqrt(mean_d (g_draw(d) - g_true(d))^2) over integer lags 1..s_max, per draw.
[[nodiscard]] std::vector<double> rmse_per_draw(const SampleTrace& trace, std::size_t l,
                                                std::size_t k, const Kernel& truth);

struct FiveNumber {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

[[nodiscard]] FiveNumber five_number_summary(std::vector<double> values);

/// Per (k, t) band of lambda^k(t) over draws, using the observed history.
struct IntensityBand {
    std::size_t dims = 0;
    std::size_t steps = 0;
    std::vector<BandPoint> points;  ///< k * steps + t

    [[nodiscard]] const BandPoint& at(std::size_t k, std::size_t t) const { return points[k * steps + t]; }
};

[[nodiscard]] IntensityBand intensity_band(const SampleTrace& trace, const CountSeries& data);

/// Names follow "mu[k]", "alpha[l,k]" and, for geometric traces, "beta[l,k]" (0-based).
struct ParameterSummary {
    std::string name;
    BandPoint band;
};

[[nodiscard]] std::vector<ParameterSummary> static_summary(const SampleTrace& trace);
/// Natural-scale values of every static parameter per draw, in static_summary order.
[[nodiscard]] std::vector<std::string> static_parameter_names(const SampleTrace& trace);
[[nodiscard]] std::vector<std::vector<double>> static_parameter_series(const SampleTrace& trace);

/// Sample autocorrelation at lags 0..max_lag.
[[nodiscard]] std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag);

/// Split-R-hat: each chain halved, then the between/within variance ratio.
[[nodiscard]] double split_rhat(const std::vector<std::vector<double>>& chains);
/// Multi-chain ESS with Geyer's initial monotone sequence truncation.
[[nodiscard]] double effective_sample_size(const std::vector<std::vector<double>>& chains);

struct ParameterDiagnostics {
    std::string name;
    double rhat = 0.0;       ///< NaN with fewer than 2 chains
    double ess = 0.0;        ///< pooled over chains
    std::vector<double> ess_per_chain;
    std::vector<double> autocorrelations;  ///< pooled-chain mean at `Diagnostics::lags`
};

struct Diagnostics {
    std::vector<std::size_t> lags;
    std::vector<ParameterDiagnostics> parameters;
    MoveCounters counters;
    std::map<std::string, double> acceptance_rates;  ///< by move name, attempted moves only
    /// Per pair: J -> number of draws.
    std::vector<std::map<std::size_t, std::size_t>> component_occupancy;
};

[[nodiscard]] Diagnostics diagnostics(const std::vector<SampleTrace>& chains,
                                      std::vector<std::size_t> lags = {1, 5, 10, 50});

}  // namespace dthp
