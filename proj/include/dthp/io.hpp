#pragma once

#include "dthp/count_series.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dthp {

[[nodiscard]] std::string format_date(std::chrono::sys_days date);
[[nodiscard]] std::optional<std::chrono::sys_days> parse_date(const std::string& text);

/// Count CSV: either a header `date,<label_1>,...,<label_K>` with ISO dates
/// on consecutive days, a header of labels only, or a headerless grid of K
/// columns. Lines starting with '#' are comments. Rows are days.
[[nodiscard]] CountSeries parse_counts(std::istream& in, const std::string& source,
                                       CountKind kind = CountKind::integer);
[[nodiscard]] CountSeries load_counts(const std::filesystem::path& path,
                                      CountKind kind = CountKind::integer);

/// Canonical form: optional '#' comment lines, a header row (with the date
/// column when the series has a start date) and one row per day.
[[nodiscard]] std::string format_counts(const CountSeries& series,
                                        const std::vector<std::string>& comments = {});
void save_counts(const std::filesystem::path& path, const CountSeries& series,
                 const std::vector<std::string>& comments = {});

/// Centered moving average, truncated at the edges (days t - (w-1)/2 through
/// t + w/2 that exist). Rounded half-up to integers unless `keep_real`.
[[nodiscard]] CountSeries rolling_smooth(const CountSeries& series, std::size_t window = 7,
                                         bool keep_real = false);

/// Split at 1-based day indices; each boundary starts a new phase. Boundaries
/// must be strictly increasing and inside (1, T).
[[nodiscard]] std::vector<CountSeries> split_phases(const CountSeries& series,
                                                    std::span<const std::size_t> boundaries);

/// Write via a temporary file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace dthp
