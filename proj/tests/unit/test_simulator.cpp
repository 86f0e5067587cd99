#include "oracles.hpp"

#include "dthp/error.hpp"
#include "dthp/simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace dthp;

namespace {

SimulationConfig config_for(DthpModel model, std::size_t steps, std::uint64_t seed) {
    SimulationConfig c;
    c.model = std::move(model);
    c.steps = steps;
    c.seed = seed;
    return c;
}

const HistogramKernel three_bin({0, 2, 4, 7}, {1.0, 0.5, 0.2});

}  // namespace

TEST_CASE("without excitation the mean count is the baseline") {
    const auto series = simulate(config_for(make_model({2.0}, {0.0}, HistogramKernel::flat(7)), 10000, 5));
    const double mean = series.total() / 10000.0;
    CHECK(std::abs(mean - 2.0) < 3.0 * std::sqrt(2.0 / 10000.0));
}

TEST_CASE("without excitation counts follow a Poisson law") {
    const double mu = 3.0;
    const auto series = simulate(config_for(make_model({mu}, {0.0}, HistogramKernel::flat(7)), 10000, 17));
    std::map<int, double> observed;
    for (double y : series.row(0)) {
        observed[static_cast<int>(y)] += 1.0;
    }
    // Cells 0..8 and a pooled upper tail.
    double statistic = 0.0;
    double tail_expected = 10000.0;
    double tail_observed = 10000.0;
    double log_pmf = -mu;
    for (int y = 0; y <= 8; ++y) {
        if (y > 0) {
            log_pmf += std::log(mu / y);
        }
        const double expected = 10000.0 * std::exp(log_pmf);
        statistic += (observed[y] - expected) * (observed[y] - expected) / expected;
        tail_expected -= expected;
        tail_observed -= observed[y];
    }
    statistic += (tail_observed - tail_expected) * (tail_observed - tail_expected) / tail_expected;
    CHECK(oracle::chi_square_sf(statistic, 9.0) > 0.01);
}

TEST_CASE("same seed gives the same series") {
    const auto c = config_for(make_model({1.0}, {0.9}, three_bin), 500, 3);
    CHECK(simulate(c) == simulate(c));
    auto other = c;
    other.seed = 4;
    CHECK_FALSE(simulate(c) == simulate(other));
}

TEST_CASE("univariate scenario totals are of the expected order") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const double total = simulate(config_for(make_model({1.0}, {0.9}, three_bin), 500, seed)).total();
        CHECK(total > 2000.0);
        CHECK(total < 10000.0);
    }
}

TEST_CASE("long-run mean approaches the branching identity") {
    const auto series = simulate(config_for(make_model({1.0}, {0.5}, three_bin), 50000, 8));
    CHECK(std::abs(series.total() / 50000.0 - 2.0) < 0.1);
}

TEST_CASE("replicates are independent and individually reproducible") {
    auto c = config_for(make_model({1.0}, {0.9}, three_bin), 100, 12);
    const auto batch = simulate_batch(c, 3);
    REQUIRE(batch.size() == 3);
    CHECK_FALSE(batch[0] == batch[1]);
    CHECK_FALSE(batch[1] == batch[2]);
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(simulate_replicate(c, r) == batch[r]);
    }
}

TEST_CASE("bivariate batch with moderate magnitudes stays finite") {
    auto c = config_for(make_model({1.0, 1.0}, {0.2, 0.2, 0.2, 0.2}, three_bin), 2000, 2);
    CHECK_FALSE(c.validate().has_value());
    for (const auto& s : simulate_batch(c, 3)) {
        CHECK(std::isfinite(s.total()));
        CHECK(s.total() < 2000.0 * 10.0);
    }
}

TEST_CASE("a longer horizon extends rather than changes earlier days") {
    const auto model = make_model({1.0, 0.5}, {0.3, 0.1, 0.2, 0.4}, three_bin);
    const auto short_run = simulate(config_for(model, 100, 21));
    const auto long_run = simulate(config_for(model, 250, 21));
    CHECK(long_run.slice(0, 100) == short_run);
}

TEST_CASE("explosive processes stop at the count ceiling") {
    auto c = config_for(make_model({1.0}, {3.0}, HistogramKernel::flat(2)), 2000, 1);
    c.count_ceiling = 1e6;
    CHECK(c.validate().has_value());
    try {
        (void)simulate(c);
        FAIL("expected an unstable-process error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::unstable_process);
    }
}

TEST_CASE("invalid simulation settings are rejected") {
    auto c = config_for(make_model({1.0}, {0.5}, three_bin), 0, 1);
    CHECK_THROWS_AS((void)c.validate(), Error);
    CHECK_THROWS_AS((void)simulate(c), Error);
}
