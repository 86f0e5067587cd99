#include "dthp/simulator.hpp"

#include "dthp/error.hpp"
#include "dthp/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dthp {

std::optional<std::string> SimulationConfig::validate() const {
    model.validate();
    if (steps < 1) {
        throw Error(ErrorKind::invalid_argument, "simulation horizon must be >= 1 day");
    }
    if (!(count_ceiling > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "count ceiling must be positive");
    }
    const auto stability = spectral_stability(model.magnitude, model.dims);
    if (!stability.stable) {
        std::ostringstream msg;
        msg << "magnitude matrix has spectral radius " << stability.spectral_radius
            << " >= 1; the process is not stationary";
        return msg.str();
    }
    return std::nullopt;
}

CountSeries simulate(const SimulationConfig& config) {
    (void)config.validate();
    const DthpModel& model = config.model;
    const std::size_t dims = model.dims;
    const std::size_t steps = config.steps;

    std::vector<std::vector<double>> kernel_masses;
    kernel_masses.reserve(model.kernels.size());
    for (const auto& kernel : model.kernels) {
        kernel_masses.push_back(masses(kernel));
    }

    Rng rng(config.seed);
    std::vector<double> counts(dims * steps, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t k = 0; k < dims; ++k) {
            double lambda = model.baseline[k];
            for (std::size_t l = 0; l < dims; ++l) {
                const auto& mass = kernel_masses[model.pair(l, k)];
                const std::size_t reach = std::min(t, mass.size());
                double excitation = 0.0;
                for (std::size_t d = 1; d <= reach; ++d) {
                    excitation += counts[l * steps + t - d] * mass[d - 1];
                }
                lambda += model.alpha(l, k) * excitation;
            }
            if (!std::isfinite(lambda) || lambda > config.count_ceiling) {
                std::ostringstream msg;
                msg << "unstable process: intensity " << lambda << " on day " << t + 1 << " of dimension "
                    << k + 1 << " exceeds the ceiling of " << config.count_ceiling << " events/day";
                throw Error(ErrorKind::unstable_process, msg.str());
            }
            counts[k * steps + t] = static_cast<double>(poisson(rng, lambda));
        }
    }
    return CountSeries(dims, steps, std::move(counts));
}

CountSeries simulate_replicate(const SimulationConfig& config, std::size_t replicate) {
    SimulationConfig stream = config;
    stream.seed = derive_seed(config.seed, SeedStream::replicate, replicate);
    return simulate(stream);
}

std::vector<CountSeries> simulate_batch(const SimulationConfig& config, std::size_t replicates) {
    std::vector<CountSeries> out;
    out.reserve(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
        out.push_back(simulate_replicate(config, r));
    }
    return out;
}

}  // namespace dthp
