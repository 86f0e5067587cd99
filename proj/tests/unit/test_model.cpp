#include "oracles.hpp"

#include "dthp/error.hpp"
#include "dthp/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace dthp;

namespace {

DthpModel univariate(double mu, double alpha, const Kernel& kernel) {
    return make_model({mu}, {alpha}, kernel);
}

}  // namespace

TEST_CASE("intensity on the first day is the baseline") {
    Rng rng(1);
    const auto model = oracle::random_model(rng, 3, 6);
    const auto series = oracle::random_series(rng, 3, 20, 9);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(intensity(model, series, 0, k) == model.baseline[k]);
    }
}

TEST_CASE("intensity matches a hand evaluation") {
    const auto model = univariate(1.0, 0.9, HistogramKernel::flat(7));
    const auto series = CountSeries::from_rows({{3.0, 0.0, 0.0}});
    CHECK(intensity(model, series, 1, 0) == doctest::Approx(1.0 + 0.9 * 3.0 / 7.0).epsilon(1e-15));
    CHECK(intensity(model, series, 1, 0) == doctest::Approx(1.385714).epsilon(1e-6));
}

TEST_CASE("zero magnitudes give a constant intensity") {
    const auto model = make_model({2.0, 0.5}, {0, 0, 0, 0}, HistogramKernel({0, 2, 7}, {1.0, 0.5}));
    Rng rng(2);
    const auto series = oracle::random_series(rng, 2, 30, 20);
    for (std::size_t t = 0; t < 30; ++t) {
        CHECK(intensity(model, series, t, 0) == 2.0);
        CHECK(intensity(model, series, t, 1) == 0.5);
    }
}

TEST_CASE("intensity is bounded below by the baseline and matches the oracle") {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto model = oracle::random_model(rng, 2, 8);
        const auto series = oracle::random_series(rng, 2, 25, 6);
        for (std::size_t t = 0; t < 25; ++t) {
            for (std::size_t k = 0; k < 2; ++k) {
                const double lambda = intensity(model, series, t, k);
                CHECK(lambda >= model.baseline[k]);
                CHECK(std::abs(lambda - oracle::naive_intensity(model, series, t, k)) < 1e-12);
            }
        }
    }
}

TEST_CASE("events older than the maximum lag do not contribute") {
    const auto model = univariate(1.0, 0.7, HistogramKernel({0, 1, 4}, {1.0, 0.3}));
    const auto series = CountSeries::from_rows({{5, 1, 2, 0, 3, 1, 0, 2}});
    const double before = intensity(model, series, 7, 0);
    // Day index 2 is 5 days before day index 7, outside s_max = 4.
    const auto changed = series.with_count(0, 2, 40.0);
    CHECK(intensity(model, changed, 7, 0) == before);
    // Day index 3 is within range.
    CHECK(intensity(model, series.with_count(0, 3, 40.0), 7, 0) != before);
}

TEST_CASE("intensity rejects mismatched dimensions and bad indices") {
    const auto model = univariate(1.0, 0.5, HistogramKernel::flat(3));
    const auto series = CountSeries::zeros(2, 5);
    CHECK_THROWS_AS((void)intensity(model, series, 0, 0), Error);
    const auto ok = CountSeries::zeros(1, 5);
    CHECK_THROWS_AS((void)intensity(model, ok, 5, 0), Error);
    CHECK_THROWS_AS((void)intensity(model, ok, 0, 1), Error);
}

TEST_CASE("spectral radius of magnitude matrices") {
    const std::vector<double> one{0.9};
    const auto r1 = spectral_stability(one, 1);
    CHECK(r1.spectral_radius == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(r1.stable);

    const std::vector<double> constant{0.2, 0.2, 0.2, 0.2};
    const auto r2 = spectral_stability(constant, 2);
    CHECK(r2.spectral_radius == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(r2.stable);

    const std::vector<double> identity{1, 0, 0, 1};
    const auto r3 = spectral_stability(identity, 2);
    CHECK(r3.spectral_radius == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(r3.stable);

    const std::vector<double> triangular{0.5, 0.3, 0.0, 0.2};
    CHECK(spectral_stability(triangular, 2).spectral_radius == doctest::Approx(0.5).epsilon(1e-8));

    const std::vector<double> negative{-0.1};
    CHECK_THROWS_AS((void)spectral_stability(negative, 1), Error);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS((void)univariate(0.0, 0.5, HistogramKernel::flat(3)), Error);
    CHECK_THROWS_AS((void)univariate(1.0, -0.5, HistogramKernel::flat(3)), Error);
    DthpModel bad = univariate(1.0, 0.5, HistogramKernel::flat(3));
    bad.kernels.push_back(HistogramKernel::flat(3));
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_NOTHROW(univariate(1.0, 0.0, HistogramKernel::flat(3)).validate());
}
