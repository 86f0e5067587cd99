#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace dthp {

/// Normalized histogram mass at integer `lag` for knots s_0=0 < ... < s_J and
/// positive heights theta_1..theta_J: theta_j / sum_h (s_h - s_{h-1}) theta_h
/// where lag lies in (s_{j-1}, s_j]. Zero outside 1..s_J. Heights are not
/// required to be pinned, so this is also the scale-free reference form.
[[nodiscard]] double histogram_mass(std::span<const int> knots, std::span<const double> heights,
                                    int lag);

/// Random-histogram triggering kernel with integer knots and the first height
/// pinned to 1.
///
/// Interior knot s_j owns the height of the interval (s_j, s_{j+1}]; the
/// structural edits below keep that pairing, which makes knot insertion and
/// removal exact inverses.
class HistogramKernel {
public:
    HistogramKernel(std::vector<int> knots, std::vector<double> heights);

    /// J = 1 kernel, uniform over 1..max_lag.
    static HistogramKernel flat(int max_lag);

    [[nodiscard]] int max_lag() const noexcept { return knots_.back(); }
    [[nodiscard]] std::size_t components() const noexcept { return heights_.size(); }
    [[nodiscard]] std::span<const int> knots() const noexcept { return knots_; }
    [[nodiscard]] std::span<const double> heights() const noexcept { return heights_; }

    /// sum_h (s_h - s_{h-1}) theta_h
    [[nodiscard]] double normalizer() const noexcept { return normalizer_; }

    [[nodiscard]] double evaluate(int lag) const noexcept;

    /// Masses at lags 1..max_lag (element d-1 holds lag d).
    [[nodiscard]] std::vector<double> masses() const;
    void masses_into(std::span<double> out) const;

    /// 0-based component index j with lag in (s_j, s_{j+1}].
    [[nodiscard]] std::size_t component_of(int lag) const;

    /// Integers in 1..max_lag-1 that carry no knot.
    [[nodiscard]] std::vector<int> vacant_positions() const;

    /// Replace free height theta_{j+1} (j = 1..J-1, 1-based like gamma_j).
    [[nodiscard]] HistogramKernel with_free_height(std::size_t j, double value) const;
    /// Move interior knot s_j (1 <= j <= J-1) to `position`.
    [[nodiscard]] HistogramKernel with_knot_moved(std::size_t j, int position) const;
    /// Insert a knot at a vacant `position`; `height` goes to the right sub-interval.
    [[nodiscard]] HistogramKernel with_knot_inserted(int position, double height) const;
    /// Delete interior knot s_j together with the height of its right interval.
    [[nodiscard]] HistogramKernel with_knot_removed(std::size_t j) const;

    bool operator==(const HistogramKernel& other) const {
        return knots_ == other.knots_ && heights_ == other.heights_;
    }

private:
    std::vector<int> knots_;
    std::vector<double> heights_;
    double normalizer_ = 0.0;
};

/// Geometric kernel beta (1-beta)^(lag-1), truncated at max_lag and
/// renormalized so the truncated masses sum to one.
class GeometricKernel {
public:
    GeometricKernel(double beta, int max_lag);

    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] int max_lag() const noexcept { return max_lag_; }
    [[nodiscard]] double evaluate(int lag) const noexcept;
    [[nodiscard]] std::vector<double> masses() const;
    void masses_into(std::span<double> out) const;

    bool operator==(const GeometricKernel&) const = default;

private:
    double beta_;
    int max_lag_;
    double truncated_mass_;
};

using Kernel = std::variant<HistogramKernel, GeometricKernel>;

[[nodiscard]] double evaluate(const Kernel& kernel, int lag);
[[nodiscard]] int max_lag(const Kernel& kernel);
[[nodiscard]] std::vector<double> masses(const Kernel& kernel);
void masses_into(const Kernel& kernel, std::span<double> out);

}  // namespace dthp
