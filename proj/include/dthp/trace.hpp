#pragma once

#include "dthp/kernel.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dthp {

enum class MoveKind { baseline, magnitude, height, knot_shift, birth, death, rate };
inline constexpr std::size_t move_kind_count = 7;

[[nodiscard]] const char* to_string(MoveKind kind) noexcept;

/// Skipped moves (no admissible proposal) are not attempts.
struct MoveCounter {
    std::uint64_t attempted = 0;
    std::uint64_t accepted = 0;
    std::uint64_t skipped = 0;

    [[nodiscard]] std::uint64_t rejected() const noexcept { return attempted - accepted; }
    [[nodiscard]] double acceptance_rate() const noexcept {
        return attempted == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempted);
    }
    bool operator==(const MoveCounter&) const = default;
};

struct MoveCounters {
    std::array<MoveCounter, move_kind_count> kinds{};

    MoveCounter& operator[](MoveKind kind) { return kinds[static_cast<std::size_t>(kind)]; }
    const MoveCounter& operator[](MoveKind kind) const { return kinds[static_cast<std::size_t>(kind)]; }
    MoveCounters& operator+=(const MoveCounters& other);
    bool operator==(const MoveCounters&) const = default;
};

enum class KernelFamily { histogram, geometric };

[[nodiscard]] const char* to_string(KernelFamily family) noexcept;

/// One stored posterior draw, natural-scale parameters.
struct Draw {
    std::uint64_t iteration = 0;
    double log_likelihood = 0.0;
    std::vector<double> baseline;
    std::vector<double> magnitude;
    std::vector<Kernel> kernels;

    bool operator==(const Draw&) const = default;
};

/// Where a chain's draws live inside a pooled trace.
struct ChainRecord {
    std::size_t chain_index = 0;
    std::uint64_t seed = 0;
    std::size_t first_draw = 0;
    std::size_t draw_count = 0;
    MoveCounters counters;

    bool operator==(const ChainRecord&) const = default;
};

struct SampleTrace {
    std::size_t dims = 1;
    KernelFamily family = KernelFamily::histogram;
    std::vector<Draw> draws;
    MoveCounters counters;
    std::vector<ChainRecord> chains;
    std::string config_fingerprint;

    /// One trace per chain record (single-chain traces return a copy of themselves).
    [[nodiscard]] std::vector<SampleTrace> split_by_chain() const;

    bool operator==(const SampleTrace&) const = default;
};

/// Concatenate chain traces in the given order.
[[nodiscard]] SampleTrace pool(const std::vector<SampleTrace>& chains);

}  // namespace dthp
