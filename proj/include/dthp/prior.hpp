#pragma once

#include "dthp/kernel.hpp"
#include "dthp/random.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dthp {

enum class PriorSetting { informative, relatively_informative, quite_uninformative };
enum class ContinuousParam { baseline, magnitude, height };

/// Prior on the knot structure (J, s).
///  - uniform_components: Pi(J) = 1/s_max and uniform over the C(s_max-1, J-1)
///    admissible knot sets, so J is uniform under the joint prior.
///  - as_printed: Pi(J) = 1/s_max times J!(s_max-J)!/s_max!. Summed over knot
///    sets this gives P(J) proportional to J, not uniform.
enum class StructurePrior { uniform_components, as_printed };

/// Prior on a log-parameter: Normal(mean, variance) or Uniform(lower, upper).
struct ContinuousPrior {
    enum class Family { normal, uniform };

    Family family = Family::normal;
    double mean = 0.0;
    double variance = 1.0;
    double lower = -5.0;
    double upper = 5.0;

    static ContinuousPrior normal(double mean, double variance);
    static ContinuousPrior uniform(double lower, double upper);

    [[nodiscard]] double log_density(double log_value) const;
    [[nodiscard]] double draw(Rng& rng) const;
    void validate() const;

    bool operator==(const ContinuousPrior&) const = default;
};

/// True parameter values needed by the informative setting.
struct PriorTruth {
    std::vector<double> baseline;   ///< K
    std::vector<double> magnitude;  ///< K*K
    std::vector<double> gamma_avg;  ///< K*K, see gamma_avg()

    bool operator==(const PriorTruth&) const = default;
};

/// Priors for every continuous parameter of a K-dimensional model plus the
/// structure prior. Baselines are indexed by k; magnitudes and heights by the
/// pair index l*K + k.
class PriorConfig {
public:
    PriorConfig() = default;
    /// Table defaults for `setting`. The informative setting needs `truth`:
    /// Normal(log(true) - 0.25, 0.5), whose implied lognormal mean is the true
    /// value (the second argument is a variance).
    PriorConfig(PriorSetting setting, std::size_t dims, std::optional<PriorTruth> truth = {},
                StructurePrior structure = StructurePrior::uniform_components);

    [[nodiscard]] PriorSetting setting() const noexcept { return setting_; }
    [[nodiscard]] std::size_t dims() const noexcept { return dims_; }
    [[nodiscard]] StructurePrior structure() const noexcept { return structure_; }
    void set_structure(StructurePrior structure) noexcept { structure_ = structure; }
    [[nodiscard]] const std::optional<PriorTruth>& truth() const noexcept { return truth_; }

    [[nodiscard]] const ContinuousPrior& prior(ContinuousParam which, std::size_t index) const;
    /// Replace the prior of one parameter kind for every index.
    void override_prior(ContinuousParam which, const ContinuousPrior& prior);

    [[nodiscard]] double log_prior_continuous(ContinuousParam which, std::size_t index,
                                              double log_value) const;
    /// Density of a height on its natural scale: log p(log h) - log h.
    [[nodiscard]] double log_prior_height_natural(std::size_t pair, double height) const;
    [[nodiscard]] double log_prior_structure(std::size_t components, std::span<const int> knots,
                                             int max_lag) const;
    [[nodiscard]] double log_prior_kernel(std::size_t pair, const HistogramKernel& kernel) const;

    bool operator==(const PriorConfig&) const = default;

private:
    PriorSetting setting_ = PriorSetting::relatively_informative;
    std::size_t dims_ = 1;
    StructurePrior structure_ = StructurePrior::uniform_components;
    std::optional<PriorTruth> truth_;
    std::vector<ContinuousPrior> baseline_;
    std::vector<ContinuousPrior> magnitude_;
    std::vector<ContinuousPrior> height_;
};

/// log(1/s_max) + log(J!(s_max-J)!/s_max!), the printed structure prior.
[[nodiscard]] double log_prior_structure(std::size_t components, std::span<const int> knots,
                                         int max_lag);
/// log(1/s_max) - log C(s_max-1, J-1).
[[nodiscard]] double log_prior_structure_uniform(std::size_t components, std::span<const int> knots,
                                                 int max_lag);

/// Arithmetic mean of theta_1..theta_J including the pinned theta_1 = 1.
[[nodiscard]] double gamma_avg(const HistogramKernel& kernel);

[[nodiscard]] const char* to_string(PriorSetting setting) noexcept;
[[nodiscard]] PriorSetting parse_prior_setting(const std::string& name);
[[nodiscard]] const char* to_string(StructurePrior structure) noexcept;
[[nodiscard]] StructurePrior parse_structure_prior(const std::string& name);

}  // namespace dthp
