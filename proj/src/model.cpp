#include "dthp/model.hpp"

#include "dthp/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dthp {

int DthpModel::max_lag() const {
    int out = 0;
    for (const auto& kernel : kernels) {
        out = std::max(out, dthp::max_lag(kernel));
    }
    return out;
}

void DthpModel::validate() const {
    if (dims == 0) {
        throw Error(ErrorKind::invalid_argument, "model needs K >= 1");
    }
    if (baseline.size() != dims || magnitude.size() != dims * dims || kernels.size() != dims * dims) {
        throw Error(ErrorKind::invalid_argument,
                    "model needs K baselines, K*K magnitudes and K*K kernels (K = " +
                        std::to_string(dims) + ")");
    }
    for (double mu : baseline) {
        if (!(mu > 0.0) || !std::isfinite(mu)) {
            throw Error(ErrorKind::invalid_argument, "baseline rates must be positive and finite");
        }
    }
    for (double a : magnitude) {
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw Error(ErrorKind::invalid_argument, "magnitudes must be non-negative and finite");
        }
    }
}

DthpModel make_model(std::vector<double> baseline, std::vector<double> magnitude,
                     const Kernel& shared_kernel) {
    DthpModel model;
    model.dims = baseline.size();
    model.baseline = std::move(baseline);
    model.magnitude = std::move(magnitude);
    model.kernels.assign(model.dims * model.dims, shared_kernel);
    model.validate();
    return model;
}

void require_compatible(const DthpModel& model, const CountSeries& series) {
    if (model.dims != series.dims()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "model has K = " + std::to_string(model.dims) + " but series has K = " +
                        std::to_string(series.dims()));
    }
}

double intensity(const DthpModel& model, const CountSeries& series, std::size_t t, std::size_t k) {
    require_compatible(model, series);
    if (t >= series.steps() || k >= model.dims) {
        throw Error(ErrorKind::invalid_argument, "intensity index out of range");
    }
    double lambda = model.baseline[k];
    for (std::size_t l = 0; l < model.dims; ++l) {
        const Kernel& kernel = model.kernel(l, k);
        const auto history = series.row(l);
        const auto reach = std::min<std::size_t>(t, static_cast<std::size_t>(dthp::max_lag(kernel)));
        double excitation = 0.0;
        for (std::size_t d = 1; d <= reach; ++d) {
            excitation += history[t - d] * evaluate(kernel, static_cast<int>(d));
        }
        lambda += model.alpha(l, k) * excitation;
    }
    return lambda;
}

StabilityReport spectral_stability(std::span<const double> magnitude, std::size_t dims) {
    if (dims == 0 || magnitude.size() != dims * dims) {
        throw Error(ErrorKind::invalid_argument, "magnitude matrix must be K x K");
    }
    for (double a : magnitude) {
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw Error(ErrorKind::invalid_argument, "magnitude matrix must be non-negative");
        }
    }
    // Power iteration on alpha + I: for a non-negative matrix its Perron root
    // rho + 1 is the unique eigenvalue of largest modulus, so the iteration
    // converges even for periodic (e.g. permutation) matrices.
    constexpr double tolerance = 1e-10;
    constexpr std::size_t max_iterations = 1'000'000;
    std::vector<double> x(dims, 1.0 / std::sqrt(static_cast<double>(dims)));
    std::vector<double> y(dims);
    double estimate = 0.0;
    StabilityReport report;
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        for (std::size_t i = 0; i < dims; ++i) {
            double acc = x[i];
            for (std::size_t j = 0; j < dims; ++j) {
                acc += magnitude[i * dims + j] * x[j];
            }
            y[i] = acc;
        }
        double norm = 0.0;
        for (double v : y) {
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < dims; ++i) {
            x[i] = y[i] / norm;
        }
        const bool converged = std::abs(norm - estimate) < tolerance;
        estimate = norm;
        report.iterations = it;
        if (converged) {
            break;
        }
    }
    report.spectral_radius = std::max(0.0, estimate - 1.0);
    report.stable = report.spectral_radius < 1.0;
    return report;
}

}  // namespace dthp
