#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mlmagma/magma.hpp"

namespace mlm {

class PrngError : public Error {
public:
    using Error::Error;
};

/// Which side the seed multiplies on each step.
enum class MultiplySide { right, left };

/// Multi-element pattern generator: the state advances by
/// current <- current * seeds[pattern[pos]] and pos cycles through the
/// pattern, so the state space is p^3 * pattern.size().
struct PrngConfig {
    Params3 params;
    std::vector<Vector3> seeds;
    std::vector<std::size_t> pattern;
    Vector3 initial;
    MultiplySide side = MultiplySide::right;

    std::uint32_t p() const { return params.modulus.value(); }
};

struct PrngState {
    Vector3 current;
    std::size_t pos = 0;

    bool operator==(const PrngState&) const = default;
};

/// Throws PrngError on empty seeds/pattern, out-of-range pattern entries or
/// mixed moduli.
void validate(const PrngConfig& config);

PrngState prng_init(const PrngConfig& config);

/// Advances the state and returns the new current vector.
Vector3 prng_step(PrngState& state, const PrngConfig& config);

/// p^3 * pattern length.
std::uint64_t prng_state_space(const PrngConfig& config);

struct PrngCycle {
    bool found = false;  // false: cap exhausted before the cycle closed
    std::uint64_t tail = 0;
    std::uint64_t period = 0;
};

/// Tail and period of the composite (vector, position) sequence starting
/// from prng_init(config). `cap` bounds the number of steps; 0 picks
/// 4 * state space, which always suffices.
PrngCycle prng_cycle_length(const PrngConfig& config, std::uint64_t cap = 0);

struct UniformityStats {
    std::uint64_t samples = 0;
    std::array<std::vector<std::uint64_t>, 3> counts;  // [component][value]
    double max_relative_deviation = 0;                 // max |count - E| / E
    std::array<double, 3> chi_square{};                // p - 1 degrees of freedom each
};

UniformityStats uniformity_stats(const PrngConfig& config, std::uint64_t samples);

struct SeedSearchOptions {
    std::uint64_t trials = 500;
    std::uint64_t rng_seed = 1;
    std::size_t keep = 10;         // leaderboard size
    unsigned threads = 0;
    std::uint64_t cap = 0;         // per-trial step cap, 0 = automatic
};

struct SearchEntry {
    PrngConfig config;
    PrngCycle cycle;
};

/// Samples seed tuples (alternating fully random and (0, s, x)-shaped ones)
/// and random initial vectors, measures each composite period, and returns
/// the best `keep` entries: period descending, ties by seeds then initial
/// vector. The result depends only on the options, not on thread count.
std::vector<SearchEntry> seed_search(const Params3& params, const std::vector<std::size_t>& pattern,
                                     const SeedSearchOptions& options);

/// a, a^2, a^3, ... (count vectors).
std::vector<Vector3> single_orbit_stream(const Vector3& a, const Params3& params, std::size_t count);

/// Unbiased bytes from the stream: each component value v is kept only if
/// v < 2^k with k = floor(log2 p), and its k low bits are appended to a bit
/// buffer that is cut into bytes.
std::vector<std::uint8_t> prng_bytes(PrngState& state, const PrngConfig& config, std::size_t count);

/// JSON with fields p, params, seeds, pattern, initial (and optional side).
std::string prng_config_to_json(const PrngConfig& config);
PrngConfig prng_config_from_json(std::string_view text);

}  // namespace mlm
