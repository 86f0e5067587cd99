#include "oracles.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <variant>

namespace oracle {

double kernel_mass(const dthp::Kernel& kernel, int lag) {
    if (const auto* g = std::get_if<dthp::GeometricKernel>(&kernel)) {
        if (lag < 1 || lag > g->max_lag()) {
            return 0.0;
        }
        double total = 0.0;
        for (int d = 1; d <= g->max_lag(); ++d) {
            total += g->beta() * std::pow(1.0 - g->beta(), d - 1);
        }
        return g->beta() * std::pow(1.0 - g->beta(), lag - 1) / total;
    }
    const auto& h = std::get<dthp::HistogramKernel>(kernel);
    const auto knots = h.knots();
    const auto heights = h.heights();
    const auto height_at = [&](int d) {
        for (std::size_t j = 1; j < knots.size(); ++j) {
            if (d > knots[j - 1] && d <= knots[j]) {
                return heights[j - 1];
            }
        }
        return 0.0;
    };
    if (lag < 1 || lag > h.max_lag()) {
        return 0.0;
    }
    double normalizer = 0.0;
    for (int d = 1; d <= h.max_lag(); ++d) {
        normalizer += height_at(d);
    }
    return height_at(lag) / normalizer;
}

double naive_intensity(const dthp::DthpModel& model, const dthp::CountSeries& series, std::size_t t,
                       std::size_t k) {
    double lambda = model.baseline[k];
    for (std::size_t l = 0; l < model.dims; ++l) {
        const auto& kernel = model.kernels[l * model.dims + k];
        for (std::size_t u = 0; u < t; ++u) {
            const int lag = static_cast<int>(t - u);
            lambda += model.magnitude[l * model.dims + k] * series.at(l, u) * kernel_mass(kernel, lag);
        }
    }
    return lambda;
}

double naive_log_likelihood(const dthp::DthpModel& model, const dthp::CountSeries& series) {
    double total = 0.0;
    for (std::size_t k = 0; k < model.dims; ++k) {
        for (std::size_t t = 0; t < series.steps(); ++t) {
            const double lambda = naive_intensity(model, series, t, k);
            const double y = series.at(k, t);
            total += y * std::log(lambda) - lambda - std::lgamma(y + 1.0);
        }
    }
    return total;
}

dthp::HistogramKernel random_histogram(dthp::Rng& rng, int max_lag) {
    const std::size_t components = dthp::uniform_index(rng, static_cast<std::size_t>(max_lag)) + 1;
    std::vector<int> interior;
    for (int d = 1; d < max_lag; ++d) {
        interior.push_back(d);
    }
    // Partial Fisher-Yates to pick J - 1 interior knots.
    for (std::size_t i = 0; i + 1 < components; ++i) {
        const std::size_t j = i + dthp::uniform_index(rng, interior.size() - i);
        std::swap(interior[i], interior[j]);
    }
    std::vector<int> knots{0};
    knots.insert(knots.end(), interior.begin(), interior.begin() + static_cast<std::ptrdiff_t>(components - 1));
    std::sort(knots.begin(), knots.end());
    knots.push_back(max_lag);
    std::vector<double> heights{1.0};
    for (std::size_t j = 1; j < components; ++j) {
        heights.push_back(std::exp(-5.0 + 10.0 * dthp::uniform01(rng)));
    }
    return dthp::HistogramKernel(knots, heights);
}

dthp::DthpModel random_model(dthp::Rng& rng, std::size_t dims, int max_lag) {
    dthp::DthpModel model;
    model.dims = dims;
    for (std::size_t k = 0; k < dims; ++k) {
        model.baseline.push_back(0.1 + 3.0 * dthp::uniform01(rng));
    }
    for (std::size_t p = 0; p < dims * dims; ++p) {
        model.magnitude.push_back(dthp::uniform01(rng));
        const int s = 1 + static_cast<int>(dthp::uniform_index(rng, static_cast<std::size_t>(max_lag)));
        if (dthp::uniform01(rng) < 0.2) {
            model.kernels.emplace_back(dthp::GeometricKernel(0.05 + 0.9 * dthp::uniform01(rng), s));
        } else {
            model.kernels.emplace_back(random_histogram(rng, s));
        }
    }
    return model;
}

dthp::CountSeries random_series(dthp::Rng& rng, std::size_t dims, std::size_t steps, int max_count) {
    std::vector<double> values(dims * steps);
    for (auto& v : values) {
        v = static_cast<double>(dthp::uniform_index(rng, static_cast<std::size_t>(max_count) + 1));
    }
    return dthp::CountSeries(dims, steps, std::move(values));
}

double normal_cdf(double x, double mean, double variance) {
    return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double kolmogorov_pvalue(double d, double n) {
    const double root = std::sqrt(n);
    const double lambda = (root + 0.12 + 0.11 / root) * d;
    if (lambda < 0.2) {
        return 1.0;
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) {
            break;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

double chi_square_sf(double statistic, double dof) {
    return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

double effective_size(std::span<const double> x) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    const auto acov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) {
            s += (x[i] - mean) * (x[i + lag] - mean);
        }
        return s / static_cast<double>(n);
    };
    const double c0 = acov(0);
    double tau = 1.0;
    for (std::size_t lag = 1; lag + 1 < n; lag += 2) {
        const double pair = (acov(lag) + acov(lag + 1)) / c0;
        if (pair <= 0.0) {
            break;
        }
        tau += 2.0 * pair;
    }
    return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

std::vector<std::vector<int>> knot_configurations(int max_lag, std::size_t components) {
    std::vector<std::vector<int>> out;
    std::vector<int> current{0};
    const std::function<void(int)> extend = [&](int from) {
        if (current.size() == components) {
            auto full = current;
            full.push_back(max_lag);
            out.push_back(full);
            return;
        }
        for (int s = from; s < max_lag; ++s) {
            current.push_back(s);
            extend(s + 1);
            current.pop_back();
        }
    };
    extend(1);
    return out;
}

}  // namespace oracle
