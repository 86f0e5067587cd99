#include "dthp/prior.hpp"

#include "dthp/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace dthp {
namespace {

// Informative setting: Normal(log(true) - v/2, v) with v = 0.5, i.e. the
// table's N(log(x_true) - 0.5^2, 0.5). The -v/2 offset makes the implied
// lognormal mean equal to x_true.
constexpr double informative_variance = 0.5;

ContinuousPrior informative_prior(double true_value, const char* what) {
    if (!(true_value > 0.0) || !std::isfinite(true_value)) {
        throw Error(ErrorKind::config,
                    std::string("informative prior needs a positive true ") + what + " value");
    }
    return ContinuousPrior::normal(std::log(true_value) - informative_variance / 2.0, informative_variance);
}

void check_structure(std::size_t components, std::span<const int> knots, int max_lag) {
    if (max_lag < 1 || components < 1 || components > static_cast<std::size_t>(max_lag)) {
        throw Error(ErrorKind::invalid_argument, "structure needs 1 <= J <= s_max");
    }
    if (knots.size() != components + 1 || knots.front() != 0 || knots.back() != max_lag) {
        throw Error(ErrorKind::invalid_argument, "knot vector must be (0, ..., s_max) with J+1 entries");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (knots[i] <= knots[i - 1]) {
            throw Error(ErrorKind::invalid_argument, "knots must be strictly increasing");
        }
    }
}

double log_factorial(double n) { return boost::math::lgamma(n + 1.0); }

}  // namespace

ContinuousPrior ContinuousPrior::normal(double mean, double variance) {
    ContinuousPrior p;
    p.family = Family::normal;
    p.mean = mean;
    p.variance = variance;
    p.validate();
    return p;
}

ContinuousPrior ContinuousPrior::uniform(double lower, double upper) {
    ContinuousPrior p;
    p.family = Family::uniform;
    p.lower = lower;
    p.upper = upper;
    p.validate();
    return p;
}

void ContinuousPrior::validate() const {
    if (family == Family::normal) {
        if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
            throw Error(ErrorKind::config, "normal prior needs a finite mean and a positive variance");
        }
    } else if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
        throw Error(ErrorKind::config, "uniform prior needs finite bounds with lower < upper");
    }
}

double ContinuousPrior::log_density(double log_value) const {
    if (family == Family::normal) {
        const double z = log_value - mean;
        return -0.5 * std::log(2.0 * std::numbers::pi * variance) - z * z / (2.0 * variance);
    }
    if (log_value < lower || log_value > upper) {
        return -std::numeric_limits<double>::infinity();
    }
    return -std::log(upper - lower);
}

double ContinuousPrior::draw(Rng& rng) const {
    if (family == Family::normal) {
        return mean + std::sqrt(variance) * standard_normal(rng);
    }
    return lower + (upper - lower) * uniform01(rng);
}

PriorConfig::PriorConfig(PriorSetting setting, std::size_t dims, std::optional<PriorTruth> truth,
                         StructurePrior structure)
    : setting_(setting), dims_(dims), structure_(structure), truth_(std::move(truth)) {
    if (dims == 0) {
        throw Error(ErrorKind::config, "prior needs K >= 1");
    }
    const std::size_t pairs = dims * dims;
    switch (setting) {
        case PriorSetting::informative: {
            if (!truth_) {
                throw Error(ErrorKind::config, "informative prior setting requires true parameter values");
            }
            const auto& t = *truth_;
            if (t.baseline.size() != dims || t.magnitude.size() != pairs || t.gamma_avg.size() != pairs) {
                throw Error(ErrorKind::config, "true parameter values do not match K");
            }
            for (std::size_t k = 0; k < dims; ++k) {
                baseline_.push_back(informative_prior(t.baseline[k], "baseline"));
            }
            for (std::size_t p = 0; p < pairs; ++p) {
                magnitude_.push_back(informative_prior(t.magnitude[p], "magnitude"));
                height_.push_back(informative_prior(t.gamma_avg[p], "gamma_avg"));
            }
            break;
        }
        case PriorSetting::relatively_informative: {
            const auto standard = ContinuousPrior::normal(0.0, 1.0);
            baseline_.assign(dims, standard);
            magnitude_.assign(pairs, standard);
            height_.assign(pairs, standard);
            break;
        }
        case PriorSetting::quite_uninformative: {
            const auto wide = ContinuousPrior::uniform(-5.0, 5.0);
            baseline_.assign(dims, wide);
            magnitude_.assign(pairs, wide);
            height_.assign(pairs, wide);
            break;
        }
    }
}

const ContinuousPrior& PriorConfig::prior(ContinuousParam which, std::size_t index) const {
    const auto& table = which == ContinuousParam::baseline    ? baseline_
                        : which == ContinuousParam::magnitude ? magnitude_
                                                              : height_;
    if (index >= table.size()) {
        throw Error(ErrorKind::invalid_argument, "prior index out of range");
    }
    return table[index];
}

void PriorConfig::override_prior(ContinuousParam which, const ContinuousPrior& prior) {
    prior.validate();
    auto& table = which == ContinuousParam::baseline    ? baseline_
                  : which == ContinuousParam::magnitude ? magnitude_
                                                        : height_;
    for (auto& entry : table) {
        entry = prior;
    }
}

double PriorConfig::log_prior_continuous(ContinuousParam which, std::size_t index,
                                         double log_value) const {
    return prior(which, index).log_density(log_value);
}

double PriorConfig::log_prior_height_natural(std::size_t pair, double height) const {
    if (!(height > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    const double log_height = std::log(height);
    return log_prior_continuous(ContinuousParam::height, pair, log_height) - log_height;
}

double PriorConfig::log_prior_structure(std::size_t components, std::span<const int> knots,
                                        int max_lag) const {
    return structure_ == StructurePrior::as_printed
               ? dthp::log_prior_structure(components, knots, max_lag)
               : log_prior_structure_uniform(components, knots, max_lag);
}

double PriorConfig::log_prior_kernel(std::size_t pair, const HistogramKernel& kernel) const {
    double lp = log_prior_structure(kernel.components(), kernel.knots(), kernel.max_lag());
    const auto heights = kernel.heights();
    for (std::size_t j = 1; j < heights.size(); ++j) {
        lp += log_prior_continuous(ContinuousParam::height, pair, std::log(heights[j]));
    }
    return lp;
}

double log_prior_structure(std::size_t components, std::span<const int> knots, int max_lag) {
    check_structure(components, knots, max_lag);
    const double s = max_lag;
    const double j = static_cast<double>(components);
    return -std::log(s) + log_factorial(j) + log_factorial(s - j) - log_factorial(s);
}

double log_prior_structure_uniform(std::size_t components, std::span<const int> knots, int max_lag) {
    check_structure(components, knots, max_lag);
    const double s = max_lag;
    const double j = static_cast<double>(components);
    // log C(s-1, j-1)
    const double log_sets = log_factorial(s - 1.0) - log_factorial(j - 1.0) - log_factorial(s - j);
    return -std::log(s) - log_sets;
}

double gamma_avg(const HistogramKernel& kernel) {
    const auto heights = kernel.heights();
    return std::accumulate(heights.begin(), heights.end(), 0.0) / static_cast<double>(heights.size());
}

const char* to_string(PriorSetting setting) noexcept {
    switch (setting) {
        case PriorSetting::informative: return "informative";
        case PriorSetting::relatively_informative: return "relatively_informative";
        case PriorSetting::quite_uninformative: return "quite_uninformative";
    }
    return "unknown";
}

PriorSetting parse_prior_setting(const std::string& name) {
    if (name == "informative") return PriorSetting::informative;
    if (name == "relatively_informative") return PriorSetting::relatively_informative;
    if (name == "quite_uninformative") return PriorSetting::quite_uninformative;
    throw Error(ErrorKind::config, "unknown prior setting '" + name +
                                       "' (expected informative, relatively_informative or quite_uninformative)");
}

const char* to_string(StructurePrior structure) noexcept {
    return structure == StructurePrior::as_printed ? "as_printed" : "uniform_components";
}

StructurePrior parse_structure_prior(const std::string& name) {
    if (name == "uniform_components") return StructurePrior::uniform_components;
    if (name == "as_printed") return StructurePrior::as_printed;
    throw Error(ErrorKind::config,
                "unknown structure prior '" + name + "' (expected uniform_components or as_printed)");
}

}  // namespace dthp
