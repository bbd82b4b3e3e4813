#pragma once

#include <array>
#include <cstdint>

#include "mlmagma/magma.hpp"
#include "mlmagma/random.hpp"
#include "oracles.hpp"

namespace testing_helpers {

template <std::size_t N>
std::array<std::int64_t, N> raw(const mlm::Vec<N>& v) {
    std::array<std::int64_t, N> r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = v.value(i);
    return r;
}

template <std::size_t N>
auto raw(const mlm::MagmaParams<N>& k) {
    std::array<std::int64_t, mlm::MagmaParams<N>::kCount> r{};
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = k[i].value;
    return r;
}

template <std::size_t N>
mlm::Vec<N> cooked(const std::array<std::int64_t, N>& r, mlm::PrimeModulus m) {
    mlm::Vec<N> v(m);
    for (std::size_t i = 0; i < N; ++i) v[i] = mlm::Residue{static_cast<std::uint32_t>(r[i])};
    return v;
}

inline mlm::PrimeModulus mod(std::uint64_t p) { return mlm::PrimeModulus::make(p); }

inline mlm::Vector3 v3(mlm::PrimeModulus m, std::uint64_t a0, std::uint64_t a1, std::uint64_t a2) {
    return mlm::Vector3(m, {a0, a1, a2});
}

}  // namespace testing_helpers
