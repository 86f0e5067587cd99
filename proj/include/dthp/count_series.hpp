#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dthp {

enum class CountKind { integer, real };

/// K parallel daily count sequences of a common length T.
///
/// Time indices are 0-based throughout the C++ API: `at(k, 0)` is the first
/// observed day. Values are stored dimension-major. Entries are finite and
/// non-negative; with `CountKind::integer` (the default) they must also be
/// integral. `CountKind::real` exists for smoothed series evaluated through the
/// log-gamma generalization of log(y!).
class CountSeries {
public:
    CountSeries(std::size_t dims, std::size_t steps, std::vector<double> values,
                CountKind kind = CountKind::integer);

    /// rows[k][t]
    static CountSeries from_rows(const std::vector<std::vector<double>>& rows,
                                 CountKind kind = CountKind::integer);
    static CountSeries zeros(std::size_t dims, std::size_t steps);

    [[nodiscard]] std::size_t dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t steps() const noexcept { return steps_; }
    [[nodiscard]] CountKind kind() const noexcept { return kind_; }

    [[nodiscard]] double at(std::size_t k, std::size_t t) const { return values_[k * steps_ + t]; }
    [[nodiscard]] std::span<const double> row(std::size_t k) const {
        return {values_.data() + k * steps_, steps_};
    }
    [[nodiscard]] double total() const;

    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
    void set_labels(std::vector<std::string> labels);

    [[nodiscard]] const std::optional<std::chrono::sys_days>& start_date() const noexcept {
        return start_date_;
    }
    void set_start_date(std::optional<std::chrono::sys_days> date) { start_date_ = date; }

    /// Copy with one entry replaced (validated like the constructor).
    [[nodiscard]] CountSeries with_count(std::size_t k, std::size_t t, double value) const;

    /// Contiguous sub-series of days [begin, end). Labels are kept and the start
    /// date is advanced by `begin` days.
    [[nodiscard]] CountSeries slice(std::size_t begin, std::size_t end) const;

    bool operator==(const CountSeries&) const = default;

private:
    void validate() const;

    std::size_t dims_;
    std::size_t steps_;
    std::vector<double> values_;
    CountKind kind_;
    std::vector<std::string> labels_;
    std::optional<std::chrono::sys_days> start_date_;
};

/// Default dimension labels: dim_1, ..., dim_K.
[[nodiscard]] std::vector<std::string> default_labels(std::size_t dims);

}  // namespace dthp
