#pragma once

#include <cstdint>
#include <random>

#include "mlmagma/magma.hpp"

namespace mlm {

/// mt19937_64 output is fully specified by the standard; the helpers below
/// avoid std::uniform_int_distribution so that streams are identical on
/// every standard library.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound), bound >= 1, by rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

template <std::size_t N>
Vec<N> random_vector(Rng& rng, PrimeModulus m) {
    Vec<N> v(m);
    for (std::size_t i = 0; i < N; ++i) v[i] = Residue{static_cast<std::uint32_t>(uniform_below(rng, m.value()))};
    return v;
}

template <std::size_t N>
MagmaParams<N> random_params(Rng& rng, PrimeModulus m) {
    MagmaParams<N> params(m);
    for (auto& c : params.coeffs) c = Residue{static_cast<std::uint32_t>(uniform_below(rng, m.value()))};
    return params;
}

}  // namespace mlm
