#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace dthp {

/// The engine's output sequence is fixed by the standard; all distributions
/// used on top of it come from Boost.Random, whose algorithms are fixed too,
/// so draws are reproducible across platforms and standard libraries.
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

enum class SeedStream : std::uint64_t { replicate = 1, chain = 2, geometric_chain = 3 };

/// Stream seed = mix64(mix64(seed ^ stream tag) + index). Fixed forever:
/// changing it changes every stored result.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream,
                                        std::uint64_t index) noexcept;

[[nodiscard]] double uniform01(Rng& rng);
[[nodiscard]] double standard_normal(Rng& rng);
/// Uniform on {0, ..., n-1}; n >= 1.
[[nodiscard]] std::size_t uniform_index(Rng& rng, std::size_t n);
/// Inversion below mean 10, PTRD rejection above.
[[nodiscard]] std::int64_t poisson(Rng& rng, double mean);

[[nodiscard]] std::string save_rng(const Rng& rng);
[[nodiscard]] Rng load_rng(const std::string& state);

}  // namespace dthp
