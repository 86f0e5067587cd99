#include "dthp/kernel.hpp"

#include "dthp/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dthp {
namespace {

double normalizer_of(std::span<const int> knots, std::span<const double> heights) {
    double z = 0.0;
    for (std::size_t h = 0; h < heights.size(); ++h) {
        z += static_cast<double>(knots[h + 1] - knots[h]) * heights[h];
    }
    return z;
}

std::size_t component_index(std::span<const int> knots, int lag) {
    const auto it = std::lower_bound(knots.begin() + 1, knots.end(), lag);
    return static_cast<std::size_t>(it - (knots.begin() + 1));
}

void check_structure(std::span<const int> knots, std::span<const double> heights) {
    if (knots.size() < 2 || heights.size() != knots.size() - 1) {
        throw Error(ErrorKind::invalid_argument,
                    "histogram kernel needs J+1 knots and J heights with J >= 1");
    }
    if (knots.front() != 0) {
        throw Error(ErrorKind::invalid_argument, "first knot must be 0");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (knots[i] <= knots[i - 1]) {
            throw Error(ErrorKind::invalid_argument, "knots must be strictly increasing");
        }
    }
    for (double h : heights) {
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw Error(ErrorKind::invalid_argument, "histogram heights must be positive and finite");
        }
    }
}

}  // namespace

double histogram_mass(std::span<const int> knots, std::span<const double> heights, int lag) {
    check_structure(knots, heights);
    if (lag < 1 || lag > knots.back()) {
        return 0.0;
    }
    return heights[component_index(knots, lag)] / normalizer_of(knots, heights);
}

HistogramKernel::HistogramKernel(std::vector<int> knots, std::vector<double> heights)
    : knots_(std::move(knots)), heights_(std::move(heights)) {
    check_structure(knots_, heights_);
    if (heights_.front() != 1.0) {
        throw Error(ErrorKind::invalid_argument, "first histogram height is pinned to 1");
    }
    normalizer_ = normalizer_of(knots_, heights_);
}

HistogramKernel HistogramKernel::flat(int max_lag) {
    if (max_lag < 1) {
        throw Error(ErrorKind::invalid_argument, "maximum lag must be >= 1");
    }
    return HistogramKernel({0, max_lag}, {1.0});
}

double HistogramKernel::evaluate(int lag) const noexcept {
    if (lag < 1 || lag > max_lag()) {
        return 0.0;
    }
    return heights_[component_index(knots_, lag)] / normalizer_;
}

std::vector<double> HistogramKernel::masses() const {
    std::vector<double> out(static_cast<std::size_t>(max_lag()));
    masses_into(out);
    return out;
}

void HistogramKernel::masses_into(std::span<double> out) const {
    for (std::size_t j = 0; j < heights_.size(); ++j) {
        const double mass = heights_[j] / normalizer_;
        for (int d = knots_[j] + 1; d <= knots_[j + 1]; ++d) {
            out[static_cast<std::size_t>(d - 1)] = mass;
        }
    }
}

std::size_t HistogramKernel::component_of(int lag) const {
    if (lag < 1 || lag > max_lag()) {
        throw Error(ErrorKind::invalid_argument, "lag outside kernel support");
    }
    return component_index(knots_, lag);
}

std::vector<int> HistogramKernel::vacant_positions() const {
    std::vector<int> vacant;
    vacant.reserve(static_cast<std::size_t>(max_lag()));
    std::size_t next = 1;
    for (int p = 1; p < max_lag(); ++p) {
        if (knots_[next] == p) {
            ++next;
        } else {
            vacant.push_back(p);
        }
    }
    return vacant;
}

HistogramKernel HistogramKernel::with_free_height(std::size_t j, double value) const {
    if (j < 1 || j >= heights_.size()) {
        throw Error(ErrorKind::invalid_argument, "free height index out of range");
    }
    auto heights = heights_;
    heights[j] = value;
    return HistogramKernel(knots_, std::move(heights));
}

HistogramKernel HistogramKernel::with_knot_moved(std::size_t j, int position) const {
    if (j < 1 || j + 1 >= knots_.size()) {
        throw Error(ErrorKind::invalid_argument, "interior knot index out of range");
    }
    if (position <= knots_[j - 1] || position >= knots_[j + 1]) {
        throw Error(ErrorKind::invalid_argument, "knot move must stay between its neighbours");
    }
    auto knots = knots_;
    knots[j] = position;
    return HistogramKernel(std::move(knots), heights_);
}

HistogramKernel HistogramKernel::with_knot_inserted(int position, double height) const {
    if (position < 1 || position >= max_lag()) {
        throw Error(ErrorKind::invalid_argument, "new knot must be an interior integer");
    }
    const auto it = std::lower_bound(knots_.begin(), knots_.end(), position);
    if (*it == position) {
        throw Error(ErrorKind::invalid_argument, "knot position already occupied");
    }
    const auto idx = it - knots_.begin();
    auto knots = knots_;
    auto heights = heights_;
    knots.insert(knots.begin() + idx, position);
    heights.insert(heights.begin() + idx, height);
    return HistogramKernel(std::move(knots), std::move(heights));
}

HistogramKernel HistogramKernel::with_knot_removed(std::size_t j) const {
    if (j < 1 || j + 1 >= knots_.size()) {
        throw Error(ErrorKind::invalid_argument, "interior knot index out of range");
    }
    auto knots = knots_;
    auto heights = heights_;
    knots.erase(knots.begin() + static_cast<std::ptrdiff_t>(j));
    heights.erase(heights.begin() + static_cast<std::ptrdiff_t>(j));
    return HistogramKernel(std::move(knots), std::move(heights));
}

GeometricKernel::GeometricKernel(double beta, int max_lag) : beta_(beta), max_lag_(max_lag) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw Error(ErrorKind::invalid_argument, "geometric beta must lie in (0, 1)");
    }
    if (max_lag < 1) {
        throw Error(ErrorKind::invalid_argument, "maximum lag must be >= 1");
    }
    // 1 - (1-beta)^max_lag
    truncated_mass_ = -std::expm1(static_cast<double>(max_lag) * std::log1p(-beta));
}

double GeometricKernel::evaluate(int lag) const noexcept {
    if (lag < 1 || lag > max_lag_) {
        return 0.0;
    }
    return beta_ * std::pow(1.0 - beta_, lag - 1) / truncated_mass_;
}

std::vector<double> GeometricKernel::masses() const {
    std::vector<double> out(static_cast<std::size_t>(max_lag_));
    masses_into(out);
    return out;
}

void GeometricKernel::masses_into(std::span<double> out) const {
    for (int d = 1; d <= max_lag_; ++d) {
        out[static_cast<std::size_t>(d - 1)] = evaluate(d);
    }
}

double evaluate(const Kernel& kernel, int lag) {
    return std::visit([lag](const auto& k) { return k.evaluate(lag); }, kernel);
}

int max_lag(const Kernel& kernel) {
    return std::visit([](const auto& k) { return k.max_lag(); }, kernel);
}

std::vector<double> masses(const Kernel& kernel) {
    return std::visit([](const auto& k) { return k.masses(); }, kernel);
}

void masses_into(const Kernel& kernel, std::span<double> out) {
    if (out.size() != static_cast<std::size_t>(max_lag(kernel))) {
        throw Error(ErrorKind::invalid_argument, "mass buffer must hold exactly max_lag entries");
    }
    std::visit([out](const auto& k) { k.masses_into(out); }, kernel);
}

}  // namespace dthp
