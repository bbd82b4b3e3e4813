#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mlmagma/magma.hpp"

namespace mlm {

/// Given base and target = base^n, find n by trying base^1, base^2, ...
template <std::size_t N>
struct DipInstance {
    Vec<N> base;
    Vec<N> target;
    MagmaParams<N> params;
    std::uint64_t cap = 0;  // largest exponent to try
};

struct DipResult {
    std::optional<std::uint64_t> exponent;  // smallest n <= cap with base^n == target
    std::uint64_t steps = 0;                // powers compared against the target
};

/// Exhaustive search; uses at most cap - 1 products and cap comparisons.
template <std::size_t N>
DipResult dip_bruteforce(const DipInstance<N>& instance);

struct DipTimingRow {
    std::uint64_t exponent = 0;
    std::uint64_t samples = 0;
    double mean_steps = 0;
    std::uint64_t min_steps = 0;
    std::uint64_t max_steps = 0;
    double mean_seconds = 0;
};

/// For each exponent n, draws `samples` random bases (non-identity), solves
/// the instance with target base^n and cap n, and records step counts and
/// wall time.
std::vector<DipTimingRow> dip_timing(const Params3& params, std::uint64_t samples,
                                     const std::vector<std::uint64_t>& exponents, std::uint64_t rng_seed);

/// Wall-clock columns are omitted unless `with_time` is set, which keeps
/// the default output reproducible.
void write_dip_timing_csv(std::ostream& os, const std::vector<DipTimingRow>& rows, bool with_time = false);

}  // namespace mlm
