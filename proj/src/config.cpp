#include "dthp/config.hpp"

#include "dthp/error.hpp"
#include "dthp/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace dthp {

using nlohmann::json;

namespace {

const std::map<std::string, ContinuousParam>& override_keys() {
    static const std::map<std::string, ContinuousParam> keys{{"baseline", ContinuousParam::baseline},
                                                             {"magnitude", ContinuousParam::magnitude},
                                                             {"height", ContinuousParam::height}};
    return keys;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) {
        throw Error(ErrorKind::config, where + " must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw Error(ErrorKind::config, "unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) {
        out = j.at(key).get<T>();
    }
}

json to_json(const ChainConfig& c) {
    return json{{"iterations", c.iterations},
                {"burn_in", c.burn_in},
                {"chains", c.chains},
                {"thin", c.thin},
                {"steps",
                 json{{"baseline", c.steps.baseline},
                      {"magnitude", c.steps.magnitude},
                      {"height", c.steps.height},
                      {"rate", c.steps.rate}}},
                {"birth_probability", c.birth_probability},
                {"birth_height_variance", c.birth_height_variance},
                {"workers", c.workers},
                {"constant_likelihood", c.constant_likelihood},
                {"debug_checks", c.debug_checks},
                {"max_init_retries", c.max_init_retries}};
}

ChainConfig chain_from_json(const json& j) {
    reject_unknown(j,
                   {"iterations", "burn_in", "chains", "thin", "steps", "birth_probability",
                    "birth_height_variance", "workers", "constant_likelihood", "debug_checks",
                    "max_init_retries"},
                   "chain");
    ChainConfig c;
    read_if(j, "iterations", c.iterations);
    read_if(j, "burn_in", c.burn_in);
    read_if(j, "chains", c.chains);
    read_if(j, "thin", c.thin);
    if (j.contains("steps")) {
        const auto& s = j.at("steps");
        reject_unknown(s, {"baseline", "magnitude", "height", "rate"}, "chain.steps");
        read_if(s, "baseline", c.steps.baseline);
        read_if(s, "magnitude", c.steps.magnitude);
        read_if(s, "height", c.steps.height);
        read_if(s, "rate", c.steps.rate);
    }
    read_if(j, "birth_probability", c.birth_probability);
    read_if(j, "birth_height_variance", c.birth_height_variance);
    read_if(j, "workers", c.workers);
    read_if(j, "constant_likelihood", c.constant_likelihood);
    read_if(j, "debug_checks", c.debug_checks);
    read_if(j, "max_init_retries", c.max_init_retries);
    return c;
}

template <typename T>
json optional_json(const std::optional<T>& value) {
    if (!value) {
        return nullptr;
    }
    if constexpr (std::is_same_v<T, DthpModel>) {
        return to_json(*value);
    } else {
        return *value;
    }
}

}  // namespace

json to_json(const ContinuousPrior& prior) {
    if (prior.family == ContinuousPrior::Family::normal) {
        return json{{"family", "normal"}, {"mean", prior.mean}, {"variance", prior.variance}};
    }
    return json{{"family", "uniform"}, {"lower", prior.lower}, {"upper", prior.upper}};
}

ContinuousPrior continuous_prior_from_json(const json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "normal") {
        reject_unknown(j, {"family", "mean", "variance"}, "normal prior");
        return ContinuousPrior::normal(j.at("mean").get<double>(), j.at("variance").get<double>());
    }
    if (family == "uniform") {
        reject_unknown(j, {"family", "lower", "upper"}, "uniform prior");
        return ContinuousPrior::uniform(j.at("lower").get<double>(), j.at("upper").get<double>());
    }
    throw Error(ErrorKind::config, "unknown prior family '" + family + "' (expected normal or uniform)");
}

ChainConfig RunConfig::chain_config() const {
    ChainConfig c = chain;
    c.seed = seed;
    return c;
}

void RunConfig::validate() const {
    chain_config().validate();
    if (max_lags.empty()) {
        throw Error(ErrorKind::config, "max_lags must hold at least one value");
    }
    for (int s : max_lags) {
        if (s < 1) {
            throw Error(ErrorKind::config, "every maximum lag must be >= 1");
        }
    }
    // One global value or K*K per-pair values.
    const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(max_lags.size()))));
    if (max_lags.size() != 1 && side * side != max_lags.size()) {
        throw Error(ErrorKind::config, "max_lags must hold 1 or K*K values, got " + std::to_string(max_lags.size()));
    }
    for (const auto& [key, value] : prior.overrides) {
        if (!override_keys().contains(key)) {
            throw Error(ErrorKind::config, "unknown prior override '" + key +
                                               "' (expected baseline, magnitude or height)");
        }
        value.validate();
    }
    if (prior.setting == PriorSetting::informative && !prior.truth && !prior.truth_path) {
        throw Error(ErrorKind::config, "the informative prior needs prior.truth or prior.truth_path");
    }
    if (simulation.steps == 0 || simulation.replicates == 0) {
        throw Error(ErrorKind::config, "simulation.steps and simulation.replicates must be >= 1");
    }
    if (!(simulation.count_ceiling > 0.0)) {
        throw Error(ErrorKind::config, "simulation.count_ceiling must be positive");
    }
    for (std::size_t i = 1; i < phase_boundaries.size(); ++i) {
        if (phase_boundaries[i] <= phase_boundaries[i - 1]) {
            throw Error(ErrorKind::config, "phase_boundaries must be strictly increasing");
        }
    }
}

json to_json(const RunConfig& c) {
    json overrides = json::object();
    for (const auto& [key, value] : c.prior.overrides) {
        overrides[key] = to_json(value);
    }
    return json{{"seed", c.seed},
                {"data", optional_json(c.data_path)},
                {"dimensions", c.dimensions},
                {"labels", c.labels},
                {"max_lags", c.max_lags},
                {"prior",
                 json{{"setting", to_string(c.prior.setting)},
                      {"structure", to_string(c.prior.structure)},
                      {"overrides", overrides},
                      {"truth", optional_json(c.prior.truth)},
                      {"truth_path", optional_json(c.prior.truth_path)}}},
                {"chain", to_json(c.chain)},
                {"phase_boundaries", c.phase_boundaries},
                {"smoothing_window", c.smoothing_window},
                {"allow_real_counts", c.allow_real_counts},
                {"output_dir", c.output_dir},
                {"simulation",
                 json{{"model", optional_json(c.simulation.model)},
                      {"steps", c.simulation.steps},
                      {"replicates", c.simulation.replicates},
                      {"count_ceiling", c.simulation.count_ceiling}}}};
}

RunConfig run_config_from_json(const json& j) {
    try {
        reject_unknown(j,
                       {"seed", "data", "dimensions", "labels", "max_lags", "prior", "chain",
                        "phase_boundaries", "smoothing_window", "allow_real_counts", "output_dir",
                        "simulation"},
                       "config");
        RunConfig c;
        read_if(j, "seed", c.seed);
        if (j.contains("data") && !j.at("data").is_null()) {
            c.data_path = j.at("data").get<std::string>();
        }
        read_if(j, "dimensions", c.dimensions);
        read_if(j, "labels", c.labels);
        if (j.contains("max_lags")) {
            const auto& lags = j.at("max_lags");
            c.max_lags = lags.is_array() ? lags.get<std::vector<int>>() : std::vector<int>{lags.get<int>()};
        }
        if (j.contains("prior")) {
            const auto& p = j.at("prior");
            reject_unknown(p, {"setting", "structure", "overrides", "truth", "truth_path"}, "prior");
            if (p.contains("setting")) {
                c.prior.setting = parse_prior_setting(p.at("setting").get<std::string>());
            }
            if (p.contains("structure")) {
                c.prior.structure = parse_structure_prior(p.at("structure").get<std::string>());
            }
            if (p.contains("overrides")) {
                for (const auto& [key, value] : p.at("overrides").items()) {
                    c.prior.overrides[key] = continuous_prior_from_json(value);
                }
            }
            if (p.contains("truth") && !p.at("truth").is_null()) {
                c.prior.truth = model_from_json(p.at("truth"));
            }
            if (p.contains("truth_path") && !p.at("truth_path").is_null()) {
                c.prior.truth_path = p.at("truth_path").get<std::string>();
            }
        }
        if (j.contains("chain")) {
            c.chain = chain_from_json(j.at("chain"));
        }
        read_if(j, "phase_boundaries", c.phase_boundaries);
        read_if(j, "smoothing_window", c.smoothing_window);
        read_if(j, "allow_real_counts", c.allow_real_counts);
        read_if(j, "output_dir", c.output_dir);
        if (j.contains("simulation")) {
            const auto& s = j.at("simulation");
            reject_unknown(s, {"model", "steps", "replicates", "count_ceiling"}, "simulation");
            if (s.contains("model") && !s.at("model").is_null()) {
                c.simulation.model = model_from_json(s.at("model"));
            }
            read_if(s, "steps", c.simulation.steps);
            read_if(s, "replicates", c.simulation.replicates);
            read_if(s, "count_ceiling", c.simulation.count_ceiling);
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, std::string("invalid config: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::config) {
            throw;
        }
        throw Error(ErrorKind::config, std::string("invalid config: ") + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    json j;
    try {
        j = read_json(path);
    } catch (const Error& e) {
        throw Error(e.kind() == ErrorKind::io ? ErrorKind::io : ErrorKind::config, e.what());
    }
    return run_config_from_json(j);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
    return buffer;
}

std::string config_hash(const RunConfig& config) {
    // Worker count and output location do not change results.
    json j = to_json(config);
    j["chain"].erase("workers");
    j.erase("output_dir");
    return fnv1a_hex(j.dump());
}

PriorConfig make_prior_config(const RunConfig& config, std::size_t dims) {
    std::optional<PriorTruth> truth;
    if (config.prior.setting == PriorSetting::informative) {
        if (!config.prior.truth && !config.prior.truth_path) {
            throw Error(ErrorKind::config, "the informative prior needs prior.truth or prior.truth_path");
        }
        const DthpModel model = config.prior.truth ? *config.prior.truth : load_model(*config.prior.truth_path);
        if (model.dims != dims) {
            throw Error(ErrorKind::config, "truth model has K = " + std::to_string(model.dims) +
                                               " but the data has K = " + std::to_string(dims));
        }
        PriorTruth t{model.baseline, model.magnitude, {}};
        for (const auto& kernel : model.kernels) {
            const auto* h = std::get_if<HistogramKernel>(&kernel);
            t.gamma_avg.push_back(h ? gamma_avg(*h) : 1.0);
        }
        truth = std::move(t);
    }
    PriorConfig priors(config.prior.setting, dims, truth, config.prior.structure);
    for (const auto& [key, value] : config.prior.overrides) {
        const auto it = override_keys().find(key);
        if (it == override_keys().end()) {
            throw Error(ErrorKind::config, "unknown prior override '" + key + "'");
        }
        priors.override_prior(it->second, value);
    }
    return priors;
}

}  // namespace dthp
