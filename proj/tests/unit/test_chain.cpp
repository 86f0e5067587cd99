#include "dthp/chain.hpp"
#include "dthp/error.hpp"
#include "dthp/simulator.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>
#include <tuple>

using namespace dthp;

namespace {

CountSeries data_for_chains() {
    SimulationConfig c;
    c.model = make_model({1.0}, {0.9}, HistogramKernel({0, 2, 4, 7}, {1.0, 0.5, 0.2}));
    c.steps = 100;
    c.seed = 2;
    return simulate(c);
}

ChainConfig short_config(std::uint64_t iterations, std::uint64_t burn_in, std::uint64_t thin = 1) {
    ChainConfig c;
    c.iterations = iterations;
    c.burn_in = burn_in;
    c.thin = thin;
    c.seed = 9;
    return c;
}

const std::vector<int> seven{7};

}  // namespace

TEST_CASE("one stored draw when iterations exceed burn-in by one") {
    const auto data = data_for_chains();
    const PriorConfig priors(PriorSetting::relatively_informative, 1);
    const auto trace = run_chain(data, priors, short_config(11, 10), seven, 0);
    REQUIRE(trace.draws.size() == 1);
    CHECK(trace.draws.front().iteration == 11);
}

TEST_CASE("stored draw count follows burn-in and thinning") {
    const auto data = data_for_chains();
    const PriorConfig priors(PriorSetting::relatively_informative, 1);
    for (auto [iterations, burn_in, thin] : {std::tuple{100, 30, 1}, std::tuple{100, 30, 7}, std::tuple{50, 0, 5}}) {
        const auto config = short_config(iterations, burn_in, thin);
        const auto trace = run_chain(data, priors, config, seven, 0);
        CHECK(trace.draws.size() == (iterations - burn_in) / thin);
        CHECK(trace.draws.size() == config.expected_draws());
        for (const auto& d : trace.draws) {
            CHECK(d.iteration > burn_in);
            CHECK((d.iteration - burn_in) % thin == 0);
        }
    }
}

TEST_CASE("same seed gives identical traces") {
    const auto data = data_for_chains();
    const PriorConfig priors(PriorSetting::relatively_informative, 1);
    const auto config = short_config(300, 100);
    CHECK(run_chain(data, priors, config, seven, 2) == run_chain(data, priors, config, seven, 2));
    CHECK_FALSE(run_chain(data, priors, config, seven, 2).draws == run_chain(data, priors, config, seven, 3).draws);
}

TEST_CASE("parallel chains pool in chain order independent of worker count") {
    const auto data = data_for_chains();
    const PriorConfig priors(PriorSetting::relatively_informative, 1);
    auto config = short_config(200, 100);
    config.chains = 4;
    config.workers = 1;
    const auto serial = run_parallel(data, priors, config, seven);
    config.workers = 3;
    const auto threaded = run_parallel(data, priors, config, seven);
    CHECK(serial == threaded);
    REQUIRE(serial.draws.size() == 400);
    REQUIRE(serial.chains.size() == 4);
    for (std::size_t c = 0; c < 4; ++c) {
        CHECK(serial.chains[c].chain_index == c);
        CHECK(serial.chains[c].first_draw == 100 * c);
        CHECK(serial.chains[c].draw_count == 100);
        CHECK(serial.chains[c].seed == derive_seed(9, SeedStream::chain, c));
        const auto alone = run_chain(data, priors, config, seven, c);
        CHECK(std::equal(alone.draws.begin(), alone.draws.end(),
                         serial.draws.begin() + static_cast<std::ptrdiff_t>(100 * c)));
    }
    const auto parts = serial.split_by_chain();
    REQUIRE(parts.size() == 4);
    CHECK(pool(parts) == serial);
}

TEST_CASE("many chains pool every post-burn-in draw") {
    const auto data = data_for_chains();
    const PriorConfig priors(PriorSetting::relatively_informative, 1);
    auto config = short_config(40, 30);
    config.chains = 90;
    config.workers = 2;
    const auto pooled = run_parallel(data, priors, config, seven);
    CHECK(pooled.draws.size() == 90 * 10);
    CHECK(pooled.chains.size() == 90);
}

TEST_CASE("pooled counters are the sum of chain counters") {
    const auto data = data_for_chains();
    const PriorConfig priors(PriorSetting::relatively_informative, 1);
    auto config = short_config(100, 50);
    config.chains = 3;
    const auto pooled = run_parallel(data, priors, config, seven);
    MoveCounters sum;
    for (const auto& c : pooled.chains) {
        sum += c.counters;
    }
    CHECK(sum == pooled.counters);
    CHECK(pooled.counters[MoveKind::baseline].attempted == 300);
}

TEST_CASE("a failing chain is identified") {
    const auto data = CountSeries::from_rows({{500.0, 800.0, 900.0}});
    PriorConfig priors(PriorSetting::relatively_informative, 1);
    priors.override_prior(ContinuousParam::magnitude, ContinuousPrior::uniform(705.0, 709.0));
    auto config = short_config(5, 1);
    config.chains = 2;
    config.max_init_retries = 1;
    try {
        (void)run_parallel(data, priors, config, seven);
        FAIL("expected a chain failure");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).rfind("chain 0:", 0) == 0);
    }
}

TEST_CASE("maximum lags broadcast or must cover every pair") {
    CHECK(expand_max_lags(seven, 2) == std::vector<int>{7, 7, 7, 7});
    const std::vector<int> four{1, 2, 3, 4};
    CHECK(expand_max_lags(four, 2) == four);
    const std::vector<int> two{1, 2};
    CHECK_THROWS_AS((void)expand_max_lags(two, 2), Error);
    const std::vector<int> zero{0};
    CHECK_THROWS_AS((void)expand_max_lags(zero, 1), Error);
}

TEST_CASE("chain config validation") {
    CHECK_THROWS_AS(short_config(10, 10).validate(), Error);
    auto c = short_config(10, 5);
    c.thin = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = short_config(10, 5);
    c.birth_probability = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = short_config(10, 5);
    c.chains = 0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("bivariate chains use per-pair lags") {
    SimulationConfig sim;
    sim.model = make_model({1.0, 1.0}, {0.2, 0.2, 0.2, 0.2}, HistogramKernel({0, 2, 4, 7}, {1.0, 0.5, 0.2}));
    sim.steps = 120;
    const auto data = simulate(sim);
    const PriorConfig priors(PriorSetting::relatively_informative, 2);
    const std::vector<int> lags{3, 5, 7, 9};
    const auto trace = run_chain(data, priors, short_config(60, 20), lags, 0);
    for (const auto& d : trace.draws) {
        for (std::size_t p = 0; p < 4; ++p) {
            CHECK(max_lag(d.kernels[p]) == lags[p]);
        }
    }
}
