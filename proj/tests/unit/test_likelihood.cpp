#include "oracles.hpp"

#include "dthp/error.hpp"
#include "dthp/likelihood.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace dthp;

TEST_CASE("all-zero counts under unit baseline give minus the horizon") {
    const auto model = make_model({1.0}, {0.8}, HistogramKernel({0, 2, 7}, {1.0, 0.5}));
    CHECK(log_likelihood(model, CountSeries::zeros(1, 2)) == -2.0);
}

TEST_CASE("a single day is a Poisson log-mass at the baseline") {
    const auto model = make_model({1.5, 0.4}, {0.3, 0.1, 0.2, 0.5}, HistogramKernel::flat(5));
    const auto series = CountSeries::from_rows({{3.0}, {2.0}});
    const double expected = (3.0 * std::log(1.5) - 1.5 - std::lgamma(4.0)) +
                            (2.0 * std::log(0.4) - 0.4 - std::lgamma(3.0));
    CHECK(log_likelihood(model, series) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("lag-count cache indexing") {
    const auto single = precompute_lag_counts(CountSeries::from_rows({{4.0}}), 3);
    for (int d = 1; d <= 3; ++d) {
        CHECK(single.at(0, 0, d) == 0.0);
    }
    const auto cache = precompute_lag_counts(CountSeries::from_rows({{3.0, 0.0}}), 2);
    CHECK(cache.at(0, 0, 1) == 0.0);
    CHECK(cache.at(1, 0, 1) == 3.0);
    CHECK(cache.at(1, 0, 2) == 0.0);

    Rng rng(4);
    const auto series = oracle::random_series(rng, 2, 15, 9);
    const auto big = precompute_lag_counts(series, 6);
    for (std::size_t t = 0; t < 15; ++t) {
        for (std::size_t l = 0; l < 2; ++l) {
            for (int d = 1; d <= 6; ++d) {
                const double expected = static_cast<std::size_t>(d) <= t ? series.at(l, t - static_cast<std::size_t>(d)) : 0.0;
                CHECK(big.at(t, l, d) == expected);
            }
        }
    }
}

TEST_CASE("log-likelihood agrees with the naive oracle on random instances") {
    Rng rng(2024);
    for (int i = 0; i < 100; ++i) {
        const std::size_t dims = 1 + uniform_index(rng, 3);
        const std::size_t steps = 1 + uniform_index(rng, 50);
        const int s_max = 1 + static_cast<int>(uniform_index(rng, 10));
        const auto model = oracle::random_model(rng, dims, s_max);
        const auto series = oracle::random_series(rng, dims, steps, 8);
        const double expected = oracle::naive_log_likelihood(model, series);
        const double direct = log_likelihood(model, series);
        const auto cache = precompute_lag_counts(series, model.max_lag());
        const double cached = log_likelihood(model, series, cache);
        CHECK(std::abs(direct - expected) < 1e-9);
        CHECK(cached == direct);
    }
}

TEST_CASE("cache wider than the kernels gives the same value") {
    Rng rng(7);
    const auto model = oracle::random_model(rng, 2, 5);
    const auto series = oracle::random_series(rng, 2, 40, 6);
    const auto tight = precompute_lag_counts(series, model.max_lag());
    const auto wide = precompute_lag_counts(series, model.max_lag() + 9);
    CHECK(log_likelihood(model, series, wide) == log_likelihood(model, series, tight));
}

TEST_CASE("workspace staging matches fresh evaluations") {
    Rng rng(99);
    for (int i = 0; i < 30; ++i) {
        const std::size_t dims = 1 + uniform_index(rng, 3);
        auto model = oracle::random_model(rng, dims, 8);
        const auto series = oracle::random_series(rng, dims, 40, 7);
        auto cache = std::make_shared<const LagCountCache>(series, 8);
        LikelihoodWorkspace ws(series, cache, model);
        CHECK(ws.total() == log_likelihood(model, series));

        for (int step = 0; step < 20; ++step) {
            const std::size_t k = uniform_index(rng, dims);
            const std::size_t l = uniform_index(rng, dims);
            DthpModel proposal = model;
            double staged = 0.0;
            switch (uniform_index(rng, 3)) {
                case 0:
                    proposal.baseline[k] = 0.1 + uniform01(rng);
                    staged = ws.try_baseline(k, proposal.baseline[k]);
                    break;
                case 1:
                    proposal.magnitude[l * dims + k] = uniform01(rng);
                    staged = ws.try_magnitude(l, k, proposal.magnitude[l * dims + k]);
                    break;
                default:
                    proposal.kernels[l * dims + k] = oracle::random_histogram(rng, 1 + static_cast<int>(uniform_index(rng, 8)));
                    staged = ws.try_kernel(l, k, proposal.kernels[l * dims + k]);
                    break;
            }
            CHECK(staged == log_likelihood(proposal, series));
            if (uniform01(rng) < 0.5) {
                ws.commit();
                model = proposal;
            }
            CHECK(ws.total() == log_likelihood(model, series));
        }
    }
}

TEST_CASE("non-finite likelihoods are reported") {
    // The intensity on day 2 overflows to infinity.
    const auto model = make_model({1e308}, {1e308}, HistogramKernel::flat(2));
    const auto series = CountSeries::from_rows({{400.0, 1.0}});
    CHECK_THROWS_AS((void)log_likelihood(model, series), Error);
}

TEST_CASE("real-valued counts use the log-gamma generalization") {
    const auto model = make_model({2.0}, {0.0}, HistogramKernel::flat(2));
    const auto series = CountSeries::from_rows({{1.5}}, CountKind::real);
    CHECK(log_likelihood(model, series) == doctest::Approx(1.5 * std::log(2.0) - 2.0 - std::lgamma(2.5)).epsilon(1e-14));
}
