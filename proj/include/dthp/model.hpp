#pragma once

#include "dthp/count_series.hpp"
#include "dthp/kernel.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dthp {

/// K-dimensional discrete-time Hawkes model. Pair (l, k) means source l,
/// target k; pair-indexed arrays are stored row-major at l * K + k.
struct DthpModel {
    std::size_t dims = 1;
    std::vector<double> baseline;   ///< mu^k, events/day
    std::vector<double> magnitude;  ///< alpha^{lk}, expected offspring
    std::vector<Kernel> kernels;    ///< g^{lk}

    [[nodiscard]] std::size_t pair(std::size_t l, std::size_t k) const noexcept { return l * dims + k; }
    [[nodiscard]] double alpha(std::size_t l, std::size_t k) const { return magnitude[pair(l, k)]; }
    [[nodiscard]] const Kernel& kernel(std::size_t l, std::size_t k) const { return kernels[pair(l, k)]; }
    [[nodiscard]] int max_lag() const;

    /// Throws Error(invalid_argument) on size mismatch, mu <= 0, alpha < 0 or
    /// non-finite values.
    void validate() const;

    bool operator==(const DthpModel&) const = default;
};

/// Single-kernel-family convenience: every pair gets the same kernel.
[[nodiscard]] DthpModel make_model(std::vector<double> baseline, std::vector<double> magnitude,
                                   const Kernel& shared_kernel);

/// lambda^k(t) from strictly earlier counts (t is 0-based).
[[nodiscard]] double intensity(const DthpModel& model, const CountSeries& series, std::size_t t,
                               std::size_t k);

void require_compatible(const DthpModel& model, const CountSeries& series);

struct StabilityReport {
    double spectral_radius = 0.0;
    bool stable = true;
    std::size_t iterations = 0;
};

/// Spectral radius of a non-negative K x K matrix (row-major) by power
/// iteration on alpha + I, tolerance 1e-10. Stable iff radius < 1.
[[nodiscard]] StabilityReport spectral_stability(std::span<const double> magnitude, std::size_t dims);

}  // namespace dthp
