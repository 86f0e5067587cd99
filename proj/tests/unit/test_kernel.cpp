#include "oracles.hpp"

#include "dthp/error.hpp"
#include "dthp/kernel.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace dthp;

TEST_CASE("flat kernel is uniform over its support") {
    const auto kernel = HistogramKernel::flat(7);
    CHECK(kernel.components() == 1);
    for (int d = 1; d <= 7; ++d) {
        CHECK(kernel.evaluate(d) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
    }
}

TEST_CASE("two-bin kernel evaluates to height over weighted width") {
    const HistogramKernel kernel({0, 2, 7}, {1.0, 0.5});
    CHECK(kernel.normalizer() == 4.5);
    CHECK(kernel.evaluate(1) == doctest::Approx(1.0 / 4.5).epsilon(1e-15));
    CHECK(kernel.evaluate(2) == doctest::Approx(1.0 / 4.5).epsilon(1e-15));
    CHECK(kernel.evaluate(3) == doctest::Approx(0.5 / 4.5).epsilon(1e-15));
    CHECK(kernel.evaluate(5) == doctest::Approx(0.5 / 4.5).epsilon(1e-15));
    const auto m = kernel.masses();
    CHECK(std::abs(std::accumulate(m.begin(), m.end(), 0.0) - 1.0) < 1e-12);
}

TEST_CASE("intervals are half-open on the left") {
    const HistogramKernel kernel({0, 3, 5, 9}, {1.0, 2.0, 4.0});
    CHECK(kernel.component_of(1) == 0);
    CHECK(kernel.component_of(3) == 0);
    CHECK(kernel.component_of(4) == 1);
    CHECK(kernel.component_of(5) == 1);
    CHECK(kernel.component_of(6) == 2);
    CHECK(kernel.component_of(9) == 2);
}

TEST_CASE("kernels vanish beyond the maximum lag") {
    CHECK(HistogramKernel::flat(7).evaluate(8) == 0.0);
    CHECK(HistogramKernel({0, 2, 7}, {1.0, 0.5}).evaluate(100) == 0.0);
    CHECK(GeometricKernel(0.5, 7).evaluate(8) == 0.0);
    CHECK(HistogramKernel::flat(7).evaluate(0) == 0.0);
}

TEST_CASE("truncated geometric kernel is renormalized") {
    const GeometricKernel kernel(0.5, 7);
    CHECK(kernel.evaluate(1) == doctest::Approx(0.5 / 0.9921875).epsilon(1e-14));
    CHECK(kernel.evaluate(1) == doctest::Approx(0.503937).epsilon(1e-6));
    double total = 0.0;
    for (int d = 1; d <= 7; ++d) {
        total += kernel.evaluate(d);
        CHECK(kernel.evaluate(d) == doctest::Approx(oracle::kernel_mass(kernel, d)).epsilon(1e-13));
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("geometric kernel rejects beta outside (0, 1)") {
    CHECK_THROWS_AS(GeometricKernel(0.0, 7), Error);
    CHECK_THROWS_AS(GeometricKernel(1.0, 7), Error);
    CHECK_THROWS_AS(GeometricKernel(0.5, 0), Error);
}

TEST_CASE("random histogram kernels are normalized") {
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const int s_max = 2 + static_cast<int>(uniform_index(rng, 29));
        const auto kernel = oracle::random_histogram(rng, s_max);
        double total = 0.0;
        for (int d = 1; d <= s_max; ++d) {
            total += kernel.evaluate(d);
        }
        REQUIRE(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("kernel values are invariant to scaling all heights") {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto kernel = oracle::random_histogram(rng, 12);
        const double c = std::exp(-3.0 + 6.0 * uniform01(rng));
        // Scaling every height, including the first, then renormalizing by the
        // first height must reproduce the same masses.
        std::vector<double> scaled;
        for (double h : kernel.heights()) {
            scaled.push_back(c * h);
        }
        double normalizer = 0.0;
        for (std::size_t j = 0; j < scaled.size(); ++j) {
            normalizer += (kernel.knots()[j + 1] - kernel.knots()[j]) * scaled[j];
        }
        for (int d = 1; d <= 12; ++d) {
            const double direct = scaled[kernel.component_of(d)] / normalizer;
            CHECK(std::abs(direct - kernel.evaluate(d)) < 1e-12);
        }
    }
}

TEST_CASE("masses agree bit for bit with evaluate") {
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        const auto kernel = oracle::random_histogram(rng, 20);
        const auto m = kernel.masses();
        for (int d = 1; d <= 20; ++d) {
            CHECK(m[static_cast<std::size_t>(d - 1)] == kernel.evaluate(d));
        }
    }
    const GeometricKernel g(0.3, 9);
    const auto m = g.masses();
    for (int d = 1; d <= 9; ++d) {
        CHECK(m[static_cast<std::size_t>(d - 1)] == g.evaluate(d));
    }
}

TEST_CASE("invalid histogram structures are rejected") {
    CHECK_THROWS_AS(HistogramKernel({0, 7}, {2.0}), Error);              // first height must be 1
    CHECK_THROWS_AS(HistogramKernel({0, 3, 3, 7}, {1.0, 1.0, 1.0}), Error);  // repeated knot
    CHECK_THROWS_AS(HistogramKernel({1, 7}, {1.0}), Error);              // must start at 0
    CHECK_THROWS_AS(HistogramKernel({0, 2, 7}, {1.0, 0.0}), Error);      // non-positive height
    CHECK_THROWS_AS(HistogramKernel({0, 2, 7}, {1.0}), Error);           // length mismatch
    CHECK_THROWS_AS(HistogramKernel({0, 2, 7}, {1.0, std::nan("")}), Error);
    CHECK_THROWS_AS(HistogramKernel::flat(0), Error);
}

TEST_CASE("knot insertion and removal are inverse edits") {
    const HistogramKernel base({0, 2, 7}, {1.0, 0.5});
    const auto larger = base.with_knot_inserted(4, 3.0);
    CHECK(std::vector<int>(larger.knots().begin(), larger.knots().end()) == std::vector<int>{0, 2, 4, 7});
    CHECK(std::vector<double>(larger.heights().begin(), larger.heights().end()) ==
          std::vector<double>{1.0, 0.5, 3.0});
    CHECK(larger.with_knot_removed(2) == base);

    // Inserting left of an existing knot gives the new height to (new, next].
    const auto left = base.with_knot_inserted(1, 4.0);
    CHECK(std::vector<double>(left.heights().begin(), left.heights().end()) ==
          std::vector<double>{1.0, 4.0, 0.5});
    CHECK(left.with_knot_removed(1) == base);
}

TEST_CASE("knot moves keep heights attached to their knot") {
    const HistogramKernel base({0, 3, 7}, {1.0, 2.0});
    const auto moved = base.with_knot_moved(1, 5);
    CHECK(std::vector<int>(moved.knots().begin(), moved.knots().end()) == std::vector<int>{0, 5, 7});
    CHECK(moved.heights()[1] == 2.0);
    CHECK_THROWS_AS((void)base.with_knot_moved(1, 7), Error);
    CHECK_THROWS_AS((void)base.with_knot_moved(0, 1), Error);
}

TEST_CASE("vacant positions list interior integers without knots") {
    const HistogramKernel kernel({0, 3, 7}, {1.0, 2.0});
    CHECK(kernel.vacant_positions() == std::vector<int>{1, 2, 4, 5, 6});
    CHECK(HistogramKernel({0, 1, 2}, {1.0, 1.0}).vacant_positions().empty());
}

TEST_CASE("free height edits leave the first height pinned") {
    const HistogramKernel kernel({0, 3, 7}, {1.0, 2.0});
    CHECK(kernel.with_free_height(1, 5.0).heights()[1] == 5.0);
    CHECK_THROWS_AS((void)kernel.with_free_height(0, 5.0), Error);
    CHECK_THROWS_AS((void)kernel.with_free_height(1, -1.0), Error);
}
