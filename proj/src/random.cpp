#include "dthp/random.hpp"

#include "dthp/error.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <sstream>

namespace dthp {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream, std::uint64_t index) noexcept {
    return mix64(mix64(seed ^ (static_cast<std::uint64_t>(stream) << 56)) + index);
}

double uniform01(Rng& rng) { return boost::random::uniform_01<double>{}(rng); }

double standard_normal(Rng& rng) { return boost::random::normal_distribution<double>{}(rng); }

std::size_t uniform_index(Rng& rng, std::size_t n) {
    if (n == 0) {
        throw Error(ErrorKind::invalid_argument, "uniform_index needs n >= 1");
    }
    return boost::random::uniform_int_distribution<std::size_t>{0, n - 1}(rng);
}

std::int64_t poisson(Rng& rng, double mean) {
    if (mean <= 0.0) {
        return 0;
    }
    return boost::random::poisson_distribution<std::int64_t, double>{mean}(rng);
}

std::string save_rng(const Rng& rng) {
    std::ostringstream out;
    out << rng;
    return out.str();
}

Rng load_rng(const std::string& state) {
    std::istringstream in(state);
    Rng rng;
    in >> rng;
    if (!in) {
        throw Error(ErrorKind::data, "corrupt RNG state");
    }
    return rng;
}

}  // namespace dthp
