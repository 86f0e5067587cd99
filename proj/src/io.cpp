#include "dthp/io.hpp"

#include "dthp/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace dthp {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_number(const std::string& field) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (begin != end && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || begin == end) {
        return std::nullopt;
    }
    return value;
}

std::string format_number(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

std::string format_date(std::chrono::sys_days date) {
    const std::chrono::year_month_day ymd{date};
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

std::optional<std::chrono::sys_days> parse_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const auto part = [&](std::size_t pos, std::size_t len, auto& out) {
        const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        return ec == std::errc{} && ptr == text.data() + pos + len;
    };
    if (!part(0, 4, y) || !part(5, 2, m) || !part(8, 2, d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return std::chrono::sys_days{ymd};
}

CountSeries parse_counts(std::istream& in, const std::string& source, CountKind kind) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool has_dates = false;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;  // per day
    std::optional<std::chrono::sys_days> first_date;
    std::optional<std::chrono::sys_days> previous_date;
    std::size_t width = 0;

    const auto fail = [&](const std::string& what) -> Error {
        return Error(ErrorKind::data, source + ":" + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        auto fields = split_fields(text);
        if (!header_seen && rows.empty()) {
            header_seen = true;
            const bool numeric = std::all_of(fields.begin(), fields.end(),
                                             [](const std::string& f) { return parse_number(f).has_value(); });
            const bool dated = parse_date(fields.front()).has_value();
            if (!numeric && !dated) {
                has_dates = lower(fields.front()) == "date";
                labels.assign(fields.begin() + (has_dates ? 1 : 0), fields.end());
                if (labels.empty()) {
                    throw fail("header names no count columns");
                }
                width = labels.size();
                continue;
            }
            if (dated) {
                throw fail("dated rows need a `date,...` header");
            }
        }
        if (has_dates) {
            const auto date = parse_date(fields.front());
            if (!date) {
                throw fail("invalid date '" + fields.front() + "'");
            }
            if (previous_date) {
                if (*date == *previous_date) {
                    throw fail("duplicate date " + fields.front());
                }
                if (*date != *previous_date + std::chrono::days{1}) {
                    throw fail("dates must be consecutive; " + fields.front() + " follows " +
                               format_date(*previous_date));
                }
            } else {
                first_date = date;
            }
            previous_date = date;
            fields.erase(fields.begin());
        }
        if (width == 0) {
            width = fields.size();
        }
        if (fields.size() != width) {
            throw fail("ragged row: " + std::to_string(fields.size()) + " count columns, expected " +
                       std::to_string(width));
        }
        std::vector<double> row;
        for (std::size_t k = 0; k < fields.size(); ++k) {
            const auto v = parse_number(fields[k]);
            if (!v || !std::isfinite(*v)) {
                throw fail("column " + std::to_string(k + 1) + ": '" + fields[k] + "' is not a number");
            }
            if (*v < 0.0) {
                throw fail("column " + std::to_string(k + 1) + ": negative count " + fields[k]);
            }
            if (kind == CountKind::integer && *v != std::floor(*v)) {
                throw fail("column " + std::to_string(k + 1) + ": non-integer count " + fields[k]);
            }
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw Error(ErrorKind::data, source + ": no count rows");
    }
    std::vector<double> values(width * rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t k = 0; k < width; ++k) {
            values[k * rows.size() + t] = rows[t][k];
        }
    }
    CountSeries series(width, rows.size(), std::move(values), kind);
    if (!labels.empty()) {
        series.set_labels(labels);
    }
    series.set_start_date(first_date);
    return series;
}

CountSeries load_counts(const std::filesystem::path& path, CountKind kind) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open " + path.string());
    }
    return parse_counts(in, path.string(), kind);
}

std::string format_counts(const CountSeries& series, const std::vector<std::string>& comments) {
    std::ostringstream out;
    for (const auto& c : comments) {
        out << "# " << c << '\n';
    }
    const bool dated = series.start_date().has_value();
    if (dated) {
        out << "date,";
    }
    for (std::size_t k = 0; k < series.dims(); ++k) {
        out << (k ? "," : "") << series.labels()[k];
    }
    out << '\n';
    for (std::size_t t = 0; t < series.steps(); ++t) {
        if (dated) {
            out << format_date(*series.start_date() + std::chrono::days{static_cast<long>(t)}) << ',';
        }
        for (std::size_t k = 0; k < series.dims(); ++k) {
            out << (k ? "," : "") << format_number(series.at(k, t));
        }
        out << '\n';
    }
    return out.str();
}

void save_counts(const std::filesystem::path& path, const CountSeries& series,
                 const std::vector<std::string>& comments) {
    write_file_atomic(path, format_counts(series, comments));
}

CountSeries rolling_smooth(const CountSeries& series, std::size_t window, bool keep_real) {
    if (window == 0) {
        throw Error(ErrorKind::invalid_argument, "smoothing window must be >= 1");
    }
    if (window > series.steps()) {
        throw Error(ErrorKind::invalid_argument, "smoothing window " + std::to_string(window) +
                                                     " exceeds the series length " +
                                                     std::to_string(series.steps()));
    }
    const std::size_t steps = series.steps();
    const std::size_t back = (window - 1) / 2;
    const std::size_t ahead = window / 2;
    const bool integral = series.kind() == CountKind::integer;
    std::vector<double> values(series.dims() * steps);
    for (std::size_t k = 0; k < series.dims(); ++k) {
        const auto row = series.row(k);
        for (std::size_t t = 0; t < steps; ++t) {
            const std::size_t lo = t >= back ? t - back : 0;
            const std::size_t hi = std::min(steps - 1, t + ahead);
            double sum = 0.0;
            for (std::size_t u = lo; u <= hi; ++u) {
                sum += row[u];
            }
            const auto n = static_cast<double>(hi - lo + 1);
            double v = sum / n;
            if (!keep_real) {
                // Exact half-up rounding of sum / n when the sum is integral.
                v = integral ? std::floor((2.0 * sum + n) / (2.0 * n)) : std::floor(v + 0.5);
            }
            values[k * steps + t] = v;
        }
    }
    CountSeries out(series.dims(), steps, std::move(values), keep_real ? CountKind::real : CountKind::integer);
    out.set_labels(series.labels());
    out.set_start_date(series.start_date());
    return out;
}

std::vector<CountSeries> split_phases(const CountSeries& series, std::span<const std::size_t> boundaries) {
    std::size_t previous = 1;
    for (std::size_t b : boundaries) {
        if (b <= previous || b >= series.steps()) {
            throw Error(ErrorKind::config, "phase boundary " + std::to_string(b) +
                                               " must increase and lie strictly between day 1 and day " +
                                               std::to_string(series.steps()));
        }
        previous = b;
    }
    std::vector<CountSeries> phases;
    std::size_t begin = 0;
    for (std::size_t b : boundaries) {
        phases.push_back(series.slice(begin, b - 1));
        begin = b - 1;
    }
    phases.push_back(series.slice(begin, series.steps()));
    return phases;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::io, "cannot write " + temp.string());
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw Error(ErrorKind::io, "failed writing " + temp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) {
        throw Error(ErrorKind::io, "cannot rename " + temp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace dthp
