#include "dthp/count_series.hpp"

#include "dthp/error.hpp"

#include <cmath>
#include <numeric>
#include <utility>

namespace dthp {

CountSeries::CountSeries(std::size_t dims, std::size_t steps, std::vector<double> values,
                         CountKind kind)
    : dims_(dims), steps_(steps), values_(std::move(values)), kind_(kind), labels_(default_labels(dims)) {
    validate();
}

CountSeries CountSeries::from_rows(const std::vector<std::vector<double>>& rows, CountKind kind) {
    if (rows.empty()) {
        throw Error(ErrorKind::data, "count series needs at least one dimension");
    }
    const std::size_t steps = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * steps);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].size() != steps) {
            throw Error(ErrorKind::data, "ragged count series: dimension " + std::to_string(k + 1) +
                                             " has " + std::to_string(rows[k].size()) +
                                             " steps, expected " + std::to_string(steps));
        }
        values.insert(values.end(), rows[k].begin(), rows[k].end());
    }
    return CountSeries(rows.size(), steps, std::move(values), kind);
}

CountSeries CountSeries::zeros(std::size_t dims, std::size_t steps) {
    return CountSeries(dims, steps, std::vector<double>(dims * steps, 0.0));
}

void CountSeries::validate() const {
    if (dims_ == 0 || steps_ == 0) {
        throw Error(ErrorKind::data, "count series must have K >= 1 and T >= 1");
    }
    if (values_.size() != dims_ * steps_) {
        throw Error(ErrorKind::data, "count series has " + std::to_string(values_.size()) +
                                         " values, expected K*T = " + std::to_string(dims_ * steps_));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        const auto where = [&] {
            return " at dimension " + std::to_string(i / steps_ + 1) + ", day " +
                   std::to_string(i % steps_ + 1);
        };
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(ErrorKind::data, "negative or non-finite count" + where());
        }
        if (kind_ == CountKind::integer && v != std::floor(v)) {
            throw Error(ErrorKind::data, "non-integer count" + where());
        }
    }
}

double CountSeries::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

void CountSeries::set_labels(std::vector<std::string> labels) {
    if (labels.size() != dims_) {
        throw Error(ErrorKind::data, "expected " + std::to_string(dims_) + " labels, got " +
                                         std::to_string(labels.size()));
    }
    labels_ = std::move(labels);
}

CountSeries CountSeries::with_count(std::size_t k, std::size_t t, double value) const {
    if (k >= dims_ || t >= steps_) {
        throw Error(ErrorKind::invalid_argument, "count index out of range");
    }
    CountSeries copy = *this;
    copy.values_[k * steps_ + t] = value;
    copy.validate();
    return copy;
}

CountSeries CountSeries::slice(std::size_t begin, std::size_t end) const {
    if (begin >= end || end > steps_) {
        throw Error(ErrorKind::invalid_argument, "invalid slice [" + std::to_string(begin) + ", " +
                                                     std::to_string(end) + ")");
    }
    std::vector<double> values;
    values.reserve(dims_ * (end - begin));
    for (std::size_t k = 0; k < dims_; ++k) {
        const auto r = row(k);
        values.insert(values.end(), r.begin() + static_cast<std::ptrdiff_t>(begin),
                      r.begin() + static_cast<std::ptrdiff_t>(end));
    }
    CountSeries out(dims_, end - begin, std::move(values), kind_);
    out.labels_ = labels_;
    if (start_date_) {
        out.start_date_ = *start_date_ + std::chrono::days{static_cast<int>(begin)};
    }
    return out;
}

std::vector<std::string> default_labels(std::size_t dims) {
    std::vector<std::string> labels;
    labels.reserve(dims);
    for (std::size_t k = 0; k < dims; ++k) {
        labels.push_back("dim_" + std::to_string(k + 1));
    }
    return labels;
}

}  // namespace dthp
