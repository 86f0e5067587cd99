#include "dthp/trace_io.hpp"

#include "dthp/error.hpp"
#include "dthp/io.hpp"

#include <zlib.h>

#include <limits>
#include <sstream>

namespace dthp {

using nlohmann::json;

namespace {

constexpr int trace_version = 1;

json rows_of(std::span<const double> flat, std::size_t dims) {
    json rows = json::array();
    for (std::size_t l = 0; l < dims; ++l) {
        rows.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(l * dims),
                                           flat.begin() + static_cast<std::ptrdiff_t>((l + 1) * dims)));
    }
    return rows;
}

std::vector<double> flatten_rows(const json& rows, std::size_t dims, const char* what) {
    if (!rows.is_array() || rows.size() != dims) {
        throw Error(ErrorKind::data, std::string(what) + " must have " + std::to_string(dims) + " rows");
    }
    std::vector<double> flat;
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != dims) {
            throw Error(ErrorKind::data, std::string(what) + " rows must have " + std::to_string(dims) + " entries");
        }
        for (const auto& v : row) {
            flat.push_back(v.get<double>());
        }
    }
    return flat;
}

json kernel_rows(const std::vector<Kernel>& kernels, std::size_t dims) {
    json rows = json::array();
    for (std::size_t l = 0; l < dims; ++l) {
        json row = json::array();
        for (std::size_t k = 0; k < dims; ++k) {
            row.push_back(to_json(kernels[l * dims + k]));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Kernel> kernels_from_rows(const json& rows, std::size_t dims) {
    if (!rows.is_array() || rows.size() != dims) {
        throw Error(ErrorKind::data, "kernels must have " + std::to_string(dims) + " rows");
    }
    std::vector<Kernel> out;
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != dims) {
            throw Error(ErrorKind::data, "kernel rows must have " + std::to_string(dims) + " entries");
        }
        for (const auto& k : row) {
            out.push_back(kernel_from_json(k));
        }
    }
    return out;
}

/// Wrap nlohmann's exceptions so callers see one error type.
template <typename F>
auto parsing(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::data, what + ": " + e.what());
    }
}

}  // namespace

json to_json(const Kernel& kernel) {
    if (const auto* h = std::get_if<HistogramKernel>(&kernel)) {
        return json{{"type", "histogram"},
                    {"J", h->components()},
                    {"s", std::vector<int>(h->knots().begin(), h->knots().end())},
                    {"theta", std::vector<double>(h->heights().begin(), h->heights().end())}};
    }
    const auto& g = std::get<GeometricKernel>(kernel);
    return json{{"type", "geometric"}, {"beta", g.beta()}, {"s_max", g.max_lag()}};
}

Kernel kernel_from_json(const json& j) {
    return parsing("kernel", [&]() -> Kernel {
        const std::string type = j.at("type").get<std::string>();
        if (type == "histogram") {
            HistogramKernel kernel(j.at("s").get<std::vector<int>>(), j.at("theta").get<std::vector<double>>());
            if (j.contains("J") && j.at("J").get<std::size_t>() != kernel.components()) {
                throw Error(ErrorKind::data, "kernel J disagrees with its knots");
            }
            return kernel;
        }
        if (type == "geometric") {
            return GeometricKernel(j.at("beta").get<double>(), j.at("s_max").get<int>());
        }
        throw Error(ErrorKind::data, "unknown kernel type '" + type + "'");
    });
}

json to_json(const DthpModel& model) {
    return json{{"K", model.dims},
                {"mu", model.baseline},
                {"alpha", rows_of(model.magnitude, model.dims)},
                {"kernels", kernel_rows(model.kernels, model.dims)}};
}

DthpModel model_from_json(const json& j) {
    return parsing("model", [&] {
        DthpModel model;
        model.dims = j.at("K").get<std::size_t>();
        model.baseline = j.at("mu").get<std::vector<double>>();
        model.magnitude = flatten_rows(j.at("alpha"), model.dims, "alpha");
        model.kernels = kernels_from_rows(j.at("kernels"), model.dims);
        model.validate();
        return model;
    });
}

DthpModel load_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }

json to_json(const MoveCounters& counters) {
    json out = json::object();
    for (std::size_t i = 0; i < move_kind_count; ++i) {
        const auto& c = counters.kinds[i];
        out[to_string(static_cast<MoveKind>(i))] =
            json{{"attempted", c.attempted}, {"accepted", c.accepted}, {"skipped", c.skipped}};
    }
    return out;
}

MoveCounters move_counters_from_json(const json& j) {
    return parsing("move counters", [&] {
        MoveCounters out;
        for (std::size_t i = 0; i < move_kind_count; ++i) {
            const char* name = to_string(static_cast<MoveKind>(i));
            if (!j.contains(name)) {
                continue;
            }
            const auto& c = j.at(name);
            out.kinds[i] = MoveCounter{c.at("attempted").get<std::uint64_t>(), c.at("accepted").get<std::uint64_t>(),
                                       c.at("skipped").get<std::uint64_t>()};
        }
        return out;
    });
}

json to_json(const Draw& draw) {
    const std::size_t dims = draw.baseline.size();
    return json{{"iteration", draw.iteration},
                {"log_likelihood", draw.log_likelihood},
                {"mu", draw.baseline},
                {"alpha", rows_of(draw.magnitude, dims)},
                {"kernels", kernel_rows(draw.kernels, dims)}};
}

Draw draw_from_json(const json& j) {
    return parsing("draw", [&] {
        Draw draw;
        draw.iteration = j.at("iteration").get<std::uint64_t>();
        draw.log_likelihood = j.at("log_likelihood").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                                : j.at("log_likelihood").get<double>();
        draw.baseline = j.at("mu").get<std::vector<double>>();
        const std::size_t dims = draw.baseline.size();
        draw.magnitude = flatten_rows(j.at("alpha"), dims, "alpha");
        draw.kernels = kernels_from_rows(j.at("kernels"), dims);
        return draw;
    });
}

json to_json(const Checkpoint& c) {
    return json{{"format_version", Checkpoint::format_version},
                {"family", to_string(c.family)},
                {"chain", c.chain_index},
                {"seed", c.seed},
                {"iteration", c.iteration},
                {"model", to_json(c.model)},
                {"counters", to_json(c.counters)},
                {"rng", c.rng_state}};
}

Checkpoint checkpoint_from_json(const json& j) {
    return parsing("checkpoint", [&] {
        if (j.at("format_version").get<int>() != Checkpoint::format_version) {
            throw Error(ErrorKind::data, "unsupported checkpoint format version");
        }
        Checkpoint c;
        const auto family = j.at("family").get<std::string>();
        if (family != "histogram" && family != "geometric") {
            throw Error(ErrorKind::data, "unknown kernel family '" + family + "'");
        }
        c.family = family == "histogram" ? KernelFamily::histogram : KernelFamily::geometric;
        c.chain_index = j.at("chain").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.iteration = j.at("iteration").get<std::uint64_t>();
        c.model = model_from_json(j.at("model"));
        c.counters = move_counters_from_json(j.at("counters"));
        c.rng_state = j.at("rng").get<std::string>();
        return c;
    });
}

std::string gzip_compress(const std::string& data) {
    z_stream stream{};
    // windowBits 15 + 16 selects the gzip wrapper; zlib writes mtime 0, so the
    // output depends on the input bytes only.
    if (deflateInit2(&stream, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error(ErrorKind::io, "deflateInit2 failed");
    }
    std::string out(deflateBound(&stream, static_cast<uLong>(data.size())), '\0');
    stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    stream.avail_in = static_cast<uInt>(data.size());
    stream.next_out = reinterpret_cast<Bytef*>(out.data());
    stream.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&stream, Z_FINISH);
    out.resize(stream.total_out);
    deflateEnd(&stream);
    if (rc != Z_STREAM_END) {
        throw Error(ErrorKind::io, "gzip compression failed");
    }
    return out;
}

std::string gzip_decompress(const std::string& data) {
    z_stream stream{};
    if (inflateInit2(&stream, 15 + 32) != Z_OK) {
        throw Error(ErrorKind::io, "inflateInit2 failed");
    }
    stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    stream.avail_in = static_cast<uInt>(data.size());
    std::string out;
    char buffer[1 << 16];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        stream.next_out = reinterpret_cast<Bytef*>(buffer);
        stream.avail_out = sizeof buffer;
        rc = inflate(&stream, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&stream);
            throw Error(ErrorKind::data, "corrupt gzip data");
        }
        out.append(buffer, sizeof buffer - stream.avail_out);
        if (rc == Z_OK && stream.avail_in == 0 && stream.avail_out != 0) {
            inflateEnd(&stream);
            throw Error(ErrorKind::data, "truncated gzip data");
        }
    }
    inflateEnd(&stream);
    return out;
}

void write_trace(const std::filesystem::path& path, const SampleTrace& trace, const json& provenance) {
    if (trace.chains.size() > 1) {
        throw Error(ErrorKind::invalid_argument, "write_trace takes a single-chain trace");
    }
    const ChainRecord record = trace.chains.empty() ? ChainRecord{} : trace.chains.front();
    json header{{"format", "dthp-trace"},
                {"version", trace_version},
                {"dims", trace.dims},
                {"family", to_string(trace.family)},
                {"chain", json{{"index", record.chain_index}, {"seed", record.seed}}},
                {"counters", to_json(trace.counters)},
                {"provenance", provenance}};
    std::string text = header.dump() + '\n';
    for (const auto& draw : trace.draws) {
        text += to_json(draw).dump();
        text += '\n';
    }
    write_file_atomic(path, gzip_compress(text));
}

namespace {

std::vector<std::string> trace_lines(const std::filesystem::path& path) {
    const std::string text = gzip_decompress(read_file(path));
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            lines.push_back(std::move(line));
        }
    }
    if (lines.empty()) {
        throw Error(ErrorKind::data, path.string() + ": empty trace");
    }
    return lines;
}

json trace_header(const std::string& line, const std::filesystem::path& path) {
    json header = parsing(path.string(), [&] { return json::parse(line); });
    if (header.value("format", "") != "dthp-trace" || header.value("version", 0) != trace_version) {
        throw Error(ErrorKind::data, path.string() + ": not a dthp trace file");
    }
    return header;
}

}  // namespace

SampleTrace read_trace(const std::filesystem::path& path) {
    const auto lines = trace_lines(path);
    const json header = trace_header(lines.front(), path);
    return parsing(path.string(), [&] {
        SampleTrace trace;
        trace.dims = header.at("dims").get<std::size_t>();
        const auto family = header.at("family").get<std::string>();
        trace.family = family == "geometric" ? KernelFamily::geometric : KernelFamily::histogram;
        trace.counters = move_counters_from_json(header.at("counters"));
        if (header.at("provenance").contains("config_hash")) {
            trace.config_fingerprint = header.at("provenance").at("config_hash").get<std::string>();
        }
        for (std::size_t i = 1; i < lines.size(); ++i) {
            Draw draw = draw_from_json(json::parse(lines[i]));
            if (draw.baseline.size() != trace.dims) {
                throw Error(ErrorKind::data, path.string() + ": draw on line " + std::to_string(i + 1) +
                                                 " has the wrong dimension");
            }
            trace.draws.push_back(std::move(draw));
        }
        trace.chains.push_back(ChainRecord{header.at("chain").at("index").get<std::size_t>(),
                                           header.at("chain").at("seed").get<std::uint64_t>(), 0,
                                           trace.draws.size(), trace.counters});
        return trace;
    });
}

json read_trace_provenance(const std::filesystem::path& path) {
    const auto lines = trace_lines(path);
    return trace_header(lines.front(), path).at("provenance");
}

void write_json(const std::filesystem::path& path, const json& j) { write_file_atomic(path, j.dump(2) + '\n'); }

json read_json(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    return parsing(path.string(), [&] { return json::parse(text); });
}

}  // namespace dthp
