#include "dthp/posterior.hpp"

#include "dthp/error.hpp"
#include "dthp/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dthp {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// Time points per block when banding intensities; bounds memory at
/// block * draws doubles.
constexpr std::size_t intensity_block = 32;

void require_draws(const SampleTrace& trace) {
    if (trace.draws.empty()) {
        throw Error(ErrorKind::invalid_argument, "trace holds no draws");
    }
}

void require_pair(const SampleTrace& trace, std::size_t l, std::size_t k) {
    if (l >= trace.dims || k >= trace.dims) {
        throw Error(ErrorKind::invalid_argument, "kernel pair out of range");
    }
}

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample variance with n - 1 in the denominator.
double variance_of(std::span<const double> x) {
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) {
        s += (v - m) * (v - m);
    }
    return s / static_cast<double>(x.size() - 1);
}

/// Biased autocovariance at `lag` (divides by n).
double autocovariance(std::span<const double> x, double mean, std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < x.size(); ++i) {
        s += (x[i] - mean) * (x[i + lag] - mean);
    }
    return s / static_cast<double>(x.size());
}

/// All chains truncated to the shortest length.
std::vector<std::span<const double>> equal_length(const std::vector<std::vector<double>>& chains) {
    if (chains.empty()) {
        throw Error(ErrorKind::invalid_argument, "need at least one chain");
    }
    std::size_t n = chains.front().size();
    for (const auto& c : chains) {
        n = std::min(n, c.size());
    }
    std::vector<std::span<const double>> out;
    for (const auto& c : chains) {
        out.emplace_back(c.data(), n);
    }
    return out;
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw Error(ErrorKind::invalid_argument, "quantile of an empty sample");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, "quantile probability outside [0, 1]");
    }
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) {
        return sorted[lo];
    }
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, p);
}

BandPoint summarize(std::vector<double> values) {
    if (values.empty()) {
        throw Error(ErrorKind::invalid_argument, "cannot summarize an empty sample");
    }
    std::sort(values.begin(), values.end());
    return BandPoint{mean_of(values), quantile_sorted(values, 0.5), quantile_sorted(values, 0.1),
                     quantile_sorted(values, 0.9)};
}

bool KernelBand::contains(std::span<const double> truth) const {
    return lags_covered(truth) == lags.size();
}

std::size_t KernelBand::lags_covered(std::span<const double> truth) const {
    if (truth.size() != lags.size()) {
        throw Error(ErrorKind::dimension_mismatch, "truth and band have different lag counts");
    }
    std::size_t covered = 0;
    for (std::size_t d = 0; d < lags.size(); ++d) {
        covered += (truth[d] >= lags[d].lower && truth[d] <= lags[d].upper) ? 1 : 0;
    }
    return covered;
}

KernelBand kernel_band(const SampleTrace& trace, std::size_t l, std::size_t k) {
    require_draws(trace);
    require_pair(trace, l, k);
    const std::size_t pair = l * trace.dims + k;
    const int s_max = max_lag(trace.draws.front().kernels[pair]);
    std::vector<std::vector<double>> per_lag(static_cast<std::size_t>(s_max));
    std::vector<double> masses;
    for (const auto& draw : trace.draws) {
        const Kernel& kernel = draw.kernels[pair];
        if (max_lag(kernel) != s_max) {
            throw Error(ErrorKind::data, "draws disagree on the maximum lag");
        }
        masses.resize(static_cast<std::size_t>(s_max));
        masses_into(kernel, masses);
        for (std::size_t d = 0; d < masses.size(); ++d) {
            per_lag[d].push_back(masses[d]);
        }
    }
    KernelBand band;
    for (auto& values : per_lag) {
        band.lags.push_back(summarize(std::move(values)));
    }
    return band;
}

std::vector<double> rmse_per_draw(const SampleTrace& trace, std::size_t l, std::size_t k,
                                  const Kernel& truth) {
    require_pair(trace, l, k);
    const std::size_t pair = l * trace.dims + k;
    const std::vector<double> true_masses = masses(truth);
    std::vector<double> out;
    out.reserve(trace.draws.size());
    std::vector<double> draw_masses;
    for (const auto& draw : trace.draws) {
        draw_masses.resize(static_cast<std::size_t>(max_lag(draw.kernels[pair])));
        masses_into(draw.kernels[pair], draw_masses);
        if (draw_masses.size() != true_masses.size()) {
            throw Error(ErrorKind::dimension_mismatch, "true kernel and draws differ in maximum lag");
        }
        double s = 0.0;
        for (std::size_t d = 0; d < draw_masses.size(); ++d) {
            const double e = draw_masses[d] - true_masses[d];
            s += e * e;
        }
        out.push_back(std::sqrt(s / static_cast<double>(draw_masses.size())));
    }
    return out;
}

FiveNumber five_number_summary(std::vector<double> values) {
    if (values.empty()) {
        throw Error(ErrorKind::invalid_argument, "five-number summary of an empty sample");
    }
    std::sort(values.begin(), values.end());
    return FiveNumber{values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
                      quantile_sorted(values, 0.75), values.back()};
}

IntensityBand intensity_band(const SampleTrace& trace, const CountSeries& data) {
    require_draws(trace);
    if (data.dims() != trace.dims) {
        throw Error(ErrorKind::dimension_mismatch, "trace and data have different dimensions");
    }
    const std::size_t dims = trace.dims;
    const std::size_t steps = data.steps();
    const std::size_t n_draws = trace.draws.size();

    int widest = 1;
    for (const auto& kernel : trace.draws.front().kernels) {
        widest = std::max(widest, max_lag(kernel));
    }
    const LagCountCache cache(data, widest);

    IntensityBand band;
    band.dims = dims;
    band.steps = steps;
    band.points.resize(dims * steps);

    std::vector<std::vector<double>> draw_masses(dims * dims);
    std::vector<double> block(intensity_block * n_draws);
    for (std::size_t k = 0; k < dims; ++k) {
        for (std::size_t t0 = 0; t0 < steps; t0 += intensity_block) {
            const std::size_t width = std::min(intensity_block, steps - t0);
            for (std::size_t i = 0; i < n_draws; ++i) {
                const Draw& draw = trace.draws[i];
                for (std::size_t l = 0; l < dims; ++l) {
                    const Kernel& kernel = draw.kernels[l * dims + k];
                    draw_masses[l].resize(static_cast<std::size_t>(max_lag(kernel)));
                    masses_into(kernel, draw_masses[l]);
                }
                for (std::size_t dt = 0; dt < width; ++dt) {
                    double lambda = draw.baseline[k];
                    for (std::size_t l = 0; l < dims; ++l) {
                        const auto lags = cache.lags(t0 + dt, l);
                        const auto& g = draw_masses[l];
                        double excitation = 0.0;
                        for (std::size_t d = 0; d < g.size(); ++d) {
                            excitation += lags[d] * g[d];
                        }
                        lambda += draw.magnitude[l * dims + k] * excitation;
                    }
                    block[dt * n_draws + i] = lambda;
                }
            }
            for (std::size_t dt = 0; dt < width; ++dt) {
                const auto first = block.begin() + static_cast<std::ptrdiff_t>(dt * n_draws);
                band.points[k * steps + t0 + dt] =
                    summarize(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n_draws)));
            }
        }
    }
    return band;
}

std::vector<std::string> static_parameter_names(const SampleTrace& trace) {
    const std::size_t dims = trace.dims;
    std::vector<std::string> names;
    for (std::size_t k = 0; k < dims; ++k) {
        names.push_back("mu[" + std::to_string(k) + "]");
    }
    for (std::size_t l = 0; l < dims; ++l) {
        for (std::size_t k = 0; k < dims; ++k) {
            names.push_back("alpha[" + std::to_string(l) + "," + std::to_string(k) + "]");
        }
    }
    if (trace.family == KernelFamily::geometric) {
        for (std::size_t l = 0; l < dims; ++l) {
            for (std::size_t k = 0; k < dims; ++k) {
                names.push_back("beta[" + std::to_string(l) + "," + std::to_string(k) + "]");
            }
        }
    }
    return names;
}

std::vector<std::vector<double>> static_parameter_series(const SampleTrace& trace) {
    const std::size_t dims = trace.dims;
    const std::size_t pairs = dims * dims;
    const std::size_t count = dims + pairs + (trace.family == KernelFamily::geometric ? pairs : 0);
    std::vector<std::vector<double>> series(count);
    for (auto& s : series) {
        s.reserve(trace.draws.size());
    }
    for (const auto& draw : trace.draws) {
        if (draw.baseline.size() != dims || draw.magnitude.size() != pairs || draw.kernels.size() != pairs) {
            throw Error(ErrorKind::data, "draw at iteration " + std::to_string(draw.iteration) +
                                             " does not match the trace dimension");
        }
        for (std::size_t k = 0; k < dims; ++k) {
            series[k].push_back(draw.baseline[k]);
        }
        for (std::size_t p = 0; p < pairs; ++p) {
            series[dims + p].push_back(draw.magnitude[p]);
        }
        if (trace.family == KernelFamily::geometric) {
            for (std::size_t p = 0; p < pairs; ++p) {
                series[dims + pairs + p].push_back(std::get<GeometricKernel>(draw.kernels[p]).beta());
            }
        }
    }
    return series;
}

std::vector<ParameterSummary> static_summary(const SampleTrace& trace) {
    require_draws(trace);
    const auto names = static_parameter_names(trace);
    auto series = static_parameter_series(trace);
    std::vector<ParameterSummary> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        out.push_back(ParameterSummary{names[i], summarize(std::move(series[i]))});
    }
    return out;
}

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
    std::vector<double> out(max_lag + 1, nan);
    if (x.size() < 2) {
        return out;
    }
    const double m = mean_of(x);
    const double c0 = autocovariance(x, m, 0);
    if (!(c0 > 0.0)) {
        return out;
    }
    for (std::size_t lag = 0; lag <= max_lag && lag < x.size(); ++lag) {
        out[lag] = autocovariance(x, m, lag) / c0;
    }
    return out;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
    const auto equal = equal_length(chains);
    const std::size_t half = equal.front().size() / 2;
    if (half < 2) {
        return nan;
    }
    std::vector<double> means;
    std::vector<double> variances;
    for (const auto& c : equal) {
        // An odd middle draw is dropped.
        for (auto part : {c.first(half), c.last(half)}) {
            means.push_back(mean_of(part));
            variances.push_back(variance_of(part));
        }
    }
    const double n = static_cast<double>(half);
    const double within = mean_of(variances);
    const double between = n * variance_of(means);
    const double var_plus = (n - 1.0) / n * within + between / n;
    if (within == 0.0) {
        return between > 0.0 ? std::numeric_limits<double>::infinity() : nan;
    }
    return std::sqrt(var_plus / within);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains) {
    const auto equal = equal_length(chains);
    const std::size_t m = equal.size();
    const std::size_t n = equal.front().size();
    if (n < 4) {
        return nan;
    }
    std::vector<double> means(m);
    std::vector<double> variances(m);
    for (std::size_t c = 0; c < m; ++c) {
        means[c] = mean_of(equal[c]);
        variances[c] = variance_of(equal[c]);
    }
    const double nn = static_cast<double>(n);
    const double within = mean_of(variances);
    double var_plus = within * (nn - 1.0) / nn;
    if (m > 1) {
        var_plus += variance_of(means);
    }
    if (!(var_plus > 0.0)) {
        return nan;
    }
    const auto rho = [&](std::size_t lag) {
        double acov = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
            acov += autocovariance(equal[c], means[c], lag);
        }
        return 1.0 - (within - acov / static_cast<double>(m)) / var_plus;
    };

    // Geyer: sum consecutive pairs while positive, forcing them to be non-increasing.
    double previous_pair = std::numeric_limits<double>::infinity();
    double tau = -1.0;
    for (std::size_t t = 0; t + 1 < n; t += 2) {
        double pair = rho(t) + rho(t + 1);
        if (t == 0) {
            pair = 1.0 + rho(1);
        }
        if (!(pair > 0.0)) {
            break;
        }
        pair = std::min(pair, previous_pair);
        tau += 2.0 * pair;
        previous_pair = pair;
    }
    // Anti-correlated chains cannot exceed log10(n) times the draw count.
    const double draws = static_cast<double>(m) * nn;
    tau = std::max(tau, 1.0 / std::log10(draws));
    return draws / tau;
}

Diagnostics diagnostics(const std::vector<SampleTrace>& chains, std::vector<std::size_t> lags) {
    if (chains.empty()) {
        throw Error(ErrorKind::invalid_argument, "diagnostics need at least one chain");
    }
    Diagnostics out;
    out.lags = std::move(lags);
    const SampleTrace& first = chains.front();
    for (const auto& chain : chains) {
        require_draws(chain);
        if (chain.dims != first.dims || chain.family != first.family) {
            throw Error(ErrorKind::dimension_mismatch, "chains describe different models");
        }
        out.counters += chain.counters;
    }
    const std::size_t max_acf_lag = out.lags.empty() ? 0 : *std::max_element(out.lags.begin(), out.lags.end());

    const auto names = static_parameter_names(first);
    std::vector<std::vector<std::vector<double>>> per_chain;  // chain -> parameter -> values
    for (const auto& chain : chains) {
        per_chain.push_back(static_parameter_series(chain));
    }
    for (std::size_t p = 0; p < names.size(); ++p) {
        ParameterDiagnostics d;
        d.name = names[p];
        std::vector<std::vector<double>> series;
        for (auto& c : per_chain) {
            series.push_back(c[p]);
        }
        d.rhat = series.size() >= 2 ? split_rhat(series) : nan;
        d.ess = effective_sample_size(series);
        std::vector<double> acf_sum(out.lags.size(), 0.0);
        for (const auto& s : series) {
            d.ess_per_chain.push_back(effective_sample_size({s}));
            const auto acf = autocorrelation(s, max_acf_lag);
            for (std::size_t i = 0; i < out.lags.size(); ++i) {
                acf_sum[i] += acf[out.lags[i]];
            }
        }
        for (double v : acf_sum) {
            d.autocorrelations.push_back(v / static_cast<double>(series.size()));
        }
        out.parameters.push_back(std::move(d));
    }

    for (std::size_t i = 0; i < move_kind_count; ++i) {
        const auto kind = static_cast<MoveKind>(i);
        if (out.counters[kind].attempted > 0) {
            out.acceptance_rates[to_string(kind)] = out.counters[kind].acceptance_rate();
        }
    }

    if (first.family == KernelFamily::histogram) {
        out.component_occupancy.resize(first.dims * first.dims);
        for (const auto& chain : chains) {
            for (const auto& draw : chain.draws) {
                for (std::size_t p = 0; p < draw.kernels.size(); ++p) {
                    ++out.component_occupancy[p][std::get<HistogramKernel>(draw.kernels[p]).components()];
                }
            }
        }
    }
    return out;
}

}  // namespace dthp
