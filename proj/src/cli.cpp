#include "dthp/cli.hpp"

#include "dthp/chain.hpp"
#include "dthp/config.hpp"
#include "dthp/error.hpp"
#include "dthp/io.hpp"
#include "dthp/posterior.hpp"
#include "dthp/simulator.hpp"
#include "dthp/trace_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

namespace dthp::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* exit_code_help =
    "Exit codes:\n"
    "  0  success\n"
    "  1  other failure\n"
    "  2  usage error (unknown flag, missing argument)\n"
    "  3  malformed or invalid config\n"
    "  4  missing or unreadable file\n"
    "  5  invalid input data\n"
    "  6  numerical failure (unstable process, no finite likelihood)\n"
    "Errors are printed on stderr as {\"error\": {\"code\", \"kind\", \"message\"}}.";

ExitCode exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config:
        case ErrorKind::invalid_argument: return bad_config;
        case ErrorKind::io: return io_error;
        case ErrorKind::data:
        case ErrorKind::dimension_mismatch: return bad_data;
        case ErrorKind::numerical:
        case ErrorKind::unstable_process: return numerical;
    }
    return failure;
}

void report(std::ostream& err, int code, const std::string& kind, const std::string& message) {
    err << json{{"error", json{{"code", code}, {"kind", kind}, {"message", message}}}}.dump() << '\n';
}

std::string number(double v) {
    if (std::isnan(v)) {
        return "NA";
    }
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
    return std::string(buffer, ptr);
}

struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;

    [[nodiscard]] std::string comment() const {
        return std::string(version_string) + " config=" + config_hash + " seed=" + std::to_string(seed);
    }
    [[nodiscard]] json to_json() const {
        return json{{"version", version_string}, {"config_hash", config_hash}, {"seed", seed}};
    }
};

/// CSV text with a provenance comment line.
class CsvWriter {
public:
    CsvWriter(const Provenance& provenance, const std::string& header) {
        text_ << "# " << provenance.comment() << '\n' << header << '\n';
    }
    template <typename... Fields>
    void row(const Fields&... fields) {
        std::size_t i = 0;
        ((text_ << (i++ ? "," : "") << fields), ...);
        text_ << '\n';
    }
    void save(const fs::path& path) const { write_file_atomic(path, text_.str()); }

private:
    std::ostringstream text_;
};

RunConfig config_with_overrides(const std::string& path, std::optional<std::uint64_t> seed,
                                std::optional<std::size_t> workers) {
    RunConfig config = path.empty() ? RunConfig{} : load_run_config(path);
    if (seed) {
        config.seed = *seed;
    }
    if (workers) {
        config.chain.workers = *workers;
    }
    config.validate();
    return config;
}

// ---------------------------------------------------------------------------
// simulate

void simulate_command(const RunConfig& config, const fs::path& out_dir, std::ostream& out, std::ostream& err,
                      json& outputs) {
    if (!config.simulation.model) {
        throw Error(ErrorKind::config, "simulate needs simulation.model in the config");
    }
    SimulationConfig sim{*config.simulation.model, config.simulation.steps, config.seed,
                         config.simulation.replicates, config.simulation.count_ceiling};
    if (const auto warning = sim.validate()) {
        err << json{{"warning", *warning}}.dump() << '\n';
    }
    const Provenance provenance{config_hash(config), config.seed};
    const auto series = simulate_batch(sim, sim.replicates);
    for (std::size_t r = 0; r < series.size(); ++r) {
        CountSeries counts = series[r];
        if (config.labels.size() == counts.dims()) {
            counts.set_labels(config.labels);
        }
        const fs::path path =
            out_dir / (series.size() == 1 ? std::string("counts.csv") : "counts_" + std::to_string(r) + ".csv");
        save_counts(path, counts, {provenance.comment()});
        outputs.push_back(path.string());
    }
    const fs::path truth = out_dir / "truth.json";
    write_json(truth, to_json(*config.simulation.model));
    outputs.push_back(truth.string());
    (void)out;
}

// ---------------------------------------------------------------------------
// fit

CountSeries prepare_data(const RunConfig& config, const std::optional<std::string>& data_flag) {
    const auto path = data_flag ? data_flag : config.data_path;
    if (!path) {
        throw Error(ErrorKind::config, "no data: pass --data or set \"data\" in the config");
    }
    const CountKind kind = config.allow_real_counts ? CountKind::real : CountKind::integer;
    CountSeries series = load_counts(*path, kind);
    if (!config.dimensions.empty()) {
        std::vector<std::vector<double>> rows;
        std::vector<std::string> labels;
        for (std::size_t k : config.dimensions) {
            if (k >= series.dims()) {
                throw Error(ErrorKind::config, "dimension " + std::to_string(k) + " not in the data (K = " +
                                                   std::to_string(series.dims()) + ")");
            }
            const auto row = series.row(k);
            rows.emplace_back(row.begin(), row.end());
            labels.push_back(series.labels()[k]);
        }
        CountSeries selected = CountSeries::from_rows(rows, kind);
        selected.set_labels(labels);
        selected.set_start_date(series.start_date());
        series = std::move(selected);
    }
    if (!config.labels.empty()) {
        series.set_labels(config.labels);
    }
    if (config.smoothing_window > 0) {
        series = rolling_smooth(series, config.smoothing_window, config.allow_real_counts);
    }
    return series;
}

void fit_command(const RunConfig& config, const std::optional<std::string>& data_flag, const fs::path& out_dir,
                 KernelFamily family, json& outputs) {
    const CountSeries data = prepare_data(config, data_flag);
    const auto phases = split_phases(data, config.phase_boundaries);
    const PriorConfig priors = make_prior_config(config, data.dims());
    const ChainConfig chain = config.chain_config();
    const Provenance provenance{config_hash(config), config.seed};

    json manifest{{"provenance", provenance.to_json()},
                  {"family", to_string(family)},
                  {"config", to_json(config)},
                  {"phases", json::array()}};
    manifest["config"]["chain"].erase("workers");
    manifest["config"].erase("output_dir");

    for (std::size_t p = 0; p < phases.size(); ++p) {
        const fs::path phase_dir = out_dir / ("phase_" + std::to_string(p));
        save_counts(phase_dir / "data.csv", phases[p], {provenance.comment()});
        const auto results = run_chains(phases[p], priors, chain, config.max_lags, family);
        json phase{{"phase", p}, {"steps", phases[p].steps()}, {"chains", json::array()}};
        for (std::size_t c = 0; c < results.size(); ++c) {
            json trace_provenance = provenance.to_json();
            trace_provenance["phase"] = p;
            const fs::path trace_path = phase_dir / ("chain_" + std::to_string(c) + ".jsonl.gz");
            const fs::path checkpoint_path = phase_dir / ("checkpoint_" + std::to_string(c) + ".json");
            write_trace(trace_path, results[c].trace, trace_provenance);
            write_json(checkpoint_path, to_json(results[c].final_state));
            phase["chains"].push_back(json{{"index", c},
                                           {"seed", results[c].final_state.seed},
                                           {"draws", results[c].trace.draws.size()},
                                           {"trace", trace_path.filename().string()},
                                           {"checkpoint", checkpoint_path.filename().string()}});
            outputs.push_back(trace_path.string());
        }
        manifest["phases"].push_back(std::move(phase));
    }
    const fs::path manifest_path = out_dir / "fit_manifest.json";
    write_json(manifest_path, manifest);
    outputs.push_back(manifest_path.string());
}

// ---------------------------------------------------------------------------
// reading fit directories

/// Directories holding chain_*.jsonl.gz files: `dir` itself or its phase_* children.
std::vector<fs::path> trace_dirs(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw Error(ErrorKind::io, "trace directory " + dir.string() + " does not exist");
    }
    const auto has_chains = [](const fs::path& d) { return fs::exists(d / "chain_0.jsonl.gz"); };
    if (has_chains(dir)) {
        return {dir};
    }
    std::vector<fs::path> out;
    for (std::size_t p = 0; fs::is_directory(dir / ("phase_" + std::to_string(p))); ++p) {
        const fs::path phase = dir / ("phase_" + std::to_string(p));
        if (!has_chains(phase)) {
            throw Error(ErrorKind::io, phase.string() + " holds no chain_0.jsonl.gz");
        }
        out.push_back(phase);
    }
    if (out.empty()) {
        throw Error(ErrorKind::io, dir.string() + " holds no traces (chain_0.jsonl.gz or phase_0/)");
    }
    return out;
}

std::vector<SampleTrace> read_chains(const fs::path& dir) {
    std::vector<SampleTrace> chains;
    for (std::size_t c = 0; fs::exists(dir / ("chain_" + std::to_string(c) + ".jsonl.gz")); ++c) {
        chains.push_back(read_trace(dir / ("chain_" + std::to_string(c) + ".jsonl.gz")));
    }
    return chains;
}

Provenance provenance_of(const fs::path& dir) {
    const json p = read_trace_provenance(dir / "chain_0.jsonl.gz");
    return Provenance{p.value("config_hash", std::string{}), p.value("seed", std::uint64_t{0})};
}

/// Output directory for phase `dir` when summarizing `root` into `out_root`.
fs::path output_for(const fs::path& root, const fs::path& dir, const fs::path& out_root) {
    return dir == root ? out_root : out_root / dir.filename();
}

// ---------------------------------------------------------------------------
// summarize

json summarize_phase(const fs::path& dir, const fs::path& out, const std::optional<DthpModel>& truth,
                     json& outputs) {
    const auto chains = read_chains(dir);
    const SampleTrace trace = pool(chains);
    if (trace.draws.empty()) {
        throw Error(ErrorKind::data, dir.string() + ": traces hold no draws");
    }
    const Provenance provenance = provenance_of(dir);
    if (truth && truth->dims != trace.dims) {
        throw Error(ErrorKind::dimension_mismatch, "truth model and trace have different dimensions");
    }
    json summary{{"provenance", provenance.to_json()},
                 {"family", to_string(trace.family)},
                 {"draws", trace.draws.size()},
                 {"chains", chains.size()}};

    CsvWriter statics(provenance, "parameter,mean,median,q10,q90");
    json static_json = json::object();
    for (const auto& s : static_summary(trace)) {
        statics.row(s.name, number(s.band.mean), number(s.band.median), number(s.band.lower), number(s.band.upper));
        static_json[s.name] = json{{"mean", s.band.mean}, {"median", s.band.median},
                                   {"q10", s.band.lower}, {"q90", s.band.upper}};
    }
    statics.save(out / "static_summary.csv");
    summary["static"] = static_json;

    CsvWriter bands(provenance, truth ? "l,k,lag,mean,median,q10,q90,truth,covered" : "l,k,lag,mean,median,q10,q90");
    CsvWriter rmse(provenance, "l,k,min,q1,median,q3,max");
    json kernels = json::array();
    for (std::size_t l = 0; l < trace.dims; ++l) {
        for (std::size_t k = 0; k < trace.dims; ++k) {
            const KernelBand band = kernel_band(trace, l, k);
            json entry{{"l", l}, {"k", k}, {"lags", band.lags.size()}};
            std::vector<double> true_masses;
            if (truth) {
                true_masses = masses(truth->kernel(l, k));
                if (true_masses.size() != band.lags.size()) {
                    throw Error(ErrorKind::dimension_mismatch, "truth kernel has a different maximum lag");
                }
                entry["lags_covered"] = band.lags_covered(true_masses);
            }
            for (std::size_t d = 0; d < band.lags.size(); ++d) {
                const auto& b = band.lags[d];
                if (truth) {
                    const bool covered = true_masses[d] >= b.lower && true_masses[d] <= b.upper;
                    bands.row(l + 1, k + 1, d + 1, number(b.mean), number(b.median), number(b.lower),
                              number(b.upper), number(true_masses[d]), covered ? 1 : 0);
                } else {
                    bands.row(l + 1, k + 1, d + 1, number(b.mean), number(b.median), number(b.lower),
                              number(b.upper));
                }
            }
            if (truth) {
                const FiveNumber f = five_number_summary(rmse_per_draw(trace, l, k, truth->kernel(l, k)));
                rmse.row(l + 1, k + 1, number(f.min), number(f.q1), number(f.median), number(f.q3), number(f.max));
                entry["rmse"] = json{{"min", f.min}, {"q1", f.q1}, {"median", f.median}, {"q3", f.q3}, {"max", f.max}};
            }
            kernels.push_back(std::move(entry));
        }
    }
    bands.save(out / "kernel_bands.csv");
    outputs.push_back((out / "static_summary.csv").string());
    outputs.push_back((out / "kernel_bands.csv").string());
    if (truth) {
        rmse.save(out / "rmse_summary.csv");
        outputs.push_back((out / "rmse_summary.csv").string());
    }
    summary["kernels"] = std::move(kernels);

    if (fs::exists(dir / "data.csv")) {
        const CountSeries data = load_counts(dir / "data.csv", CountKind::real);
        const IntensityBand band = intensity_band(trace, data);
        CsvWriter intensity(provenance, "k,t,observed,mean,median,q10,q90");
        std::size_t inside = 0;
        for (std::size_t k = 0; k < band.dims; ++k) {
            for (std::size_t t = 0; t < band.steps; ++t) {
                const auto& b = band.at(k, t);
                intensity.row(k + 1, t + 1, number(data.at(k, t)), number(b.mean), number(b.median), number(b.lower),
                              number(b.upper));
                inside += (data.at(k, t) >= b.lower && data.at(k, t) <= b.upper) ? 1 : 0;
            }
        }
        intensity.save(out / "intensity_band.csv");
        outputs.push_back((out / "intensity_band.csv").string());
        summary["observed_inside_intensity_band"] =
            static_cast<double>(inside) / static_cast<double>(band.dims * band.steps);
    }
    write_json(out / "summary.json", summary);
    outputs.push_back((out / "summary.json").string());
    return summary;
}

// ---------------------------------------------------------------------------
// diagnose

json to_json(const Diagnostics& d) {
    json params = json::array();
    for (const auto& p : d.parameters) {
        json acf = json::object();
        for (std::size_t i = 0; i < d.lags.size(); ++i) {
            acf[std::to_string(d.lags[i])] = p.autocorrelations[i];
        }
        params.push_back(json{{"name", p.name},
                              {"rhat", p.rhat},
                              {"ess", p.ess},
                              {"ess_per_chain", p.ess_per_chain},
                              {"autocorrelation", acf}});
    }
    json occupancy = json::array();
    for (std::size_t pair = 0; pair < d.component_occupancy.size(); ++pair) {
        json table = json::object();
        for (const auto& [j, count] : d.component_occupancy[pair]) {
            table[std::to_string(j)] = count;
        }
        occupancy.push_back(json{{"pair", pair}, {"J", table}});
    }
    return json{{"parameters", params},
                {"acceptance_rates", d.acceptance_rates},
                {"counters", dthp::to_json(d.counters)},
                {"component_occupancy", occupancy}};
}

// ---------------------------------------------------------------------------
// compare

json rmse_json(const FiveNumber& f) {
    return json{{"min", f.min}, {"q1", f.q1}, {"median", f.median}, {"q3", f.q3}, {"max", f.max}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete-time Hawkes processes with random-histogram kernels", "dthp"};
    app.footer(exit_code_help);
    app.set_version_flag("--version", version_string);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> data_path;
    std::string trace_dir;
    std::optional<std::string> truth_path;
    std::string trace_a;
    std::string trace_b;

    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate counts from simulation.model");
    simulate_cmd->add_option("--config", config_path, "Run config JSON")->required();
    simulate_cmd->add_option("--out", out_dir, "Output directory (default: output_dir of the config)");
    simulate_cmd->add_option("--seed", seed, "Override the config seed");

    auto* fit_cmd = app.add_subcommand("fit", "Fit the histogram-kernel model by reversible-jump MCMC");
    auto* geo_cmd = app.add_subcommand("fit-geometric", "Fit the geometric-kernel baseline");
    for (auto* cmd : {fit_cmd, geo_cmd}) {
        cmd->add_option("--config", config_path, "Run config JSON")->required();
        cmd->add_option("--data", data_path, "Count CSV (overrides the config)");
        cmd->add_option("--out", out_dir, "Output directory (default: output_dir of the config)");
        cmd->add_option("--seed", seed, "Override the config seed");
        cmd->add_option("--workers", workers, "Worker threads (0 = all cores)");
    }

    auto* summarize_cmd = app.add_subcommand("summarize", "Posterior bands, static summaries and RMSE");
    summarize_cmd->add_option("--trace", trace_dir, "Fit output directory")->required();
    summarize_cmd->add_option("--truth", truth_path, "True model JSON");
    summarize_cmd->add_option("--out", out_dir, "Output directory (default: the trace directory)");

    auto* diagnose_cmd = app.add_subcommand("diagnose", "ESS, split R-hat, acceptance rates, J occupancy");
    diagnose_cmd->add_option("--trace", trace_dir, "Fit output directory")->required();
    diagnose_cmd->add_option("--out", out_dir, "Output directory (default: the trace directory)");

    auto* compare_cmd = app.add_subcommand("compare", "Paired kernel RMSE of two fits against a truth");
    compare_cmd->add_option("--trace-a", trace_a, "First fit directory")->required();
    compare_cmd->add_option("--trace-b", trace_b, "Second fit directory")->required();
    compare_cmd->add_option("--truth", truth_path, "True model JSON")->required();
    compare_cmd->add_option("--out", out_dir, "Output directory")->required();

    auto* init_cmd = app.add_subcommand("init-config", "Write a config template with every default");
    init_cmd->add_option("--out", out_dir, "Output file (default: stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report(err, usage, "usage", e.what());
        return usage;
    }

    json outputs = json::array();
    try {
        if (simulate_cmd->parsed()) {
            const RunConfig config = config_with_overrides(config_path, seed, std::nullopt);
            simulate_command(config, out_dir.empty() ? config.output_dir : out_dir, out, err, outputs);
        } else if (fit_cmd->parsed() || geo_cmd->parsed()) {
            const RunConfig config = config_with_overrides(config_path, seed, workers);
            fit_command(config, data_path, out_dir.empty() ? config.output_dir : out_dir,
                        fit_cmd->parsed() ? KernelFamily::histogram : KernelFamily::geometric, outputs);
        } else if (summarize_cmd->parsed()) {
            std::optional<DthpModel> truth;
            if (truth_path) {
                truth = load_model(*truth_path);
            }
            const fs::path root = trace_dir;
            const fs::path out_root = out_dir.empty() ? root : fs::path(out_dir);
            for (const auto& dir : trace_dirs(root)) {
                (void)summarize_phase(dir, output_for(root, dir, out_root), truth, outputs);
            }
        } else if (diagnose_cmd->parsed()) {
            const fs::path root = trace_dir;
            const fs::path out_root = out_dir.empty() ? root : fs::path(out_dir);
            for (const auto& dir : trace_dirs(root)) {
                const auto chains = read_chains(dir);
                json report_json = to_json(diagnostics(chains));
                report_json["provenance"] = provenance_of(dir).to_json();
                report_json["chains"] = chains.size();
                const fs::path path = output_for(root, dir, out_root) / "diagnostics.json";
                write_json(path, report_json);
                outputs.push_back(path.string());
            }
        } else if (compare_cmd->parsed()) {
            const DthpModel truth = load_model(*truth_path);
            const auto dirs_a = trace_dirs(trace_a);
            const auto dirs_b = trace_dirs(trace_b);
            if (dirs_a.size() != dirs_b.size()) {
                throw Error(ErrorKind::data, "the two fits have different numbers of phases");
            }
            const Provenance provenance = provenance_of(dirs_a.front());
            CsvWriter csv(provenance, "phase,fit,family,l,k,min,q1,median,q3,max");
            json result = json::array();
            for (std::size_t p = 0; p < dirs_a.size(); ++p) {
                const SampleTrace a = pool(read_chains(dirs_a[p]));
                const SampleTrace b = pool(read_chains(dirs_b[p]));
                for (std::size_t l = 0; l < truth.dims; ++l) {
                    for (std::size_t k = 0; k < truth.dims; ++k) {
                        json entry{{"phase", p}, {"l", l}, {"k", k}};
                        for (const auto& [name, trace] : {std::pair{"a", &a}, std::pair{"b", &b}}) {
                            const FiveNumber f = five_number_summary(rmse_per_draw(*trace, l, k, truth.kernel(l, k)));
                            csv.row(p, name, to_string(trace->family), l + 1, k + 1, number(f.min), number(f.q1),
                                    number(f.median), number(f.q3), number(f.max));
                            entry[name] = rmse_json(f);
                            entry[name]["family"] = to_string(trace->family);
                        }
                        entry["median_ratio_a_over_b"] = entry["a"]["median"].get<double>() /
                                                         entry["b"]["median"].get<double>();
                        result.push_back(std::move(entry));
                    }
                }
            }
            csv.save(fs::path(out_dir) / "compare.csv");
            write_json(fs::path(out_dir) / "compare.json", json{{"provenance", provenance.to_json()}, {"pairs", result}});
            outputs.push_back((fs::path(out_dir) / "compare.csv").string());
            outputs.push_back((fs::path(out_dir) / "compare.json").string());
        } else if (init_cmd->parsed()) {
            const json template_json = to_json(RunConfig{});
            if (out_dir.empty()) {
                out << template_json.dump(2) << '\n';
                return ok;
            }
            write_json(out_dir, template_json);
            outputs.push_back(out_dir);
        }
    } catch (const Error& e) {
        const ExitCode code = exit_code_for(e.kind());
        report(err, code, to_string(e.kind()), e.what());
        return code;
    } catch (const fs::filesystem_error& e) {
        report(err, io_error, "io", e.what());
        return io_error;
    } catch (const std::exception& e) {
        report(err, failure, "failure", e.what());
        return failure;
    }
    out << json{{"status", "ok"}, {"outputs", outputs}}.dump() << '\n';
    return ok;
}

}  // namespace dthp::cli
