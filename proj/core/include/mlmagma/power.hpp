#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "mlmagma/magma.hpp"

namespace mlm {

/// Left-associative power: a^1 = a, a^(k+1) = a^k * a. a^0 is the identity
/// (an extension; powers are otherwise defined for n >= 1). Costs n - 1
/// products.
template <std::size_t N>
Vec<N> pow_iter(const Vec<N>& a, std::uint64_t n, const MagmaParams<N>& params);

/// Square-and-multiply power. Relies on a^m * a^n = a^(m+n), which is
/// property-tested rather than proven; pow_iter is the reference.
template <std::size_t N>
Vec<N> pow_fast(const Vec<N>& a, std::uint64_t n, const MagmaParams<N>& params);

/// Outcome of an empirical identity check. `counterexample` is empty when
/// the identity held on the whole tested range.
struct PropertyCheck {
    bool holds = true;
    std::string counterexample;

    explicit operator bool() const { return holds; }
};

/// Largest n accepted by check_power_associativity (Catalan(7) = 429 trees;
/// the value set of all trees is enumerated bottom-up).
inline constexpr std::size_t kMaxParenthesizationDegree = 8;

/// True iff every full parenthesization of the n-fold product of `a` gives
/// the same vector, for every 1 <= n <= max_n. Requires 3 <= max_n <= 8.
template <std::size_t N>
PropertyCheck check_power_associativity(const Vec<N>& a, const MagmaParams<N>& params, std::size_t max_n);

/// a^m * a^n == a^n * a^m for 1 <= m <= max_m, 1 <= n <= max_n.
template <std::size_t N>
PropertyCheck check_internal_commutativity(const Vec<N>& a, const MagmaParams<N>& params, std::size_t max_m,
                                           std::size_t max_n);

/// a^m * a^n == a^(m+n) on the same grid, all powers via pow_iter.
template <std::size_t N>
PropertyCheck check_power_identity(const Vec<N>& a, const MagmaParams<N>& params, std::size_t max_m,
                                   std::size_t max_n);

/// (a^m)^n == (a^n)^m == a^(m n) on the grid, all powers via pow_iter.
template <std::size_t N>
PropertyCheck check_power_of_power(const Vec<N>& a, const MagmaParams<N>& params, std::size_t max_m,
                                   std::size_t max_n);

}  // namespace mlm
