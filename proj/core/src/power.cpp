#include "mlmagma/power.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace mlm {

template <std::size_t N>
Vec<N> pow_iter(const Vec<N>& a, std::uint64_t n, const MagmaParams<N>& params) {
    require_same_modulus(a.modulus(), params.modulus, "pow_iter");
    if (n == 0) return Vec<N>::identity(a.modulus());
    Vec<N> acc = a;
    for (std::uint64_t k = 1; k < n; ++k) acc = mul(acc, a, params);
    return acc;
}

template <std::size_t N>
Vec<N> pow_fast(const Vec<N>& a, std::uint64_t n, const MagmaParams<N>& params) {
    require_same_modulus(a.modulus(), params.modulus, "pow_fast");
    if (n == 0) return Vec<N>::identity(a.modulus());
    // Walk the bits of n from the top: a^(2k) = a^k * a^k, a^(2k+1) = a^(2k) * a.
    int top = 63;
    while (((n >> top) & 1) == 0) --top;
    Vec<N> acc = a;
    for (int bit = top - 1; bit >= 0; --bit) {
        acc = mul(acc, acc, params);
        if ((n >> bit) & 1) acc = mul(acc, a, params);
    }
    return acc;
}

namespace {

template <std::size_t N>
std::vector<Vec<N>> iterated_powers(const Vec<N>& a, std::size_t count, const MagmaParams<N>& params) {
    // powers[k] = a^k, powers[0] = e.
    std::vector<Vec<N>> powers;
    powers.reserve(count + 1);
    powers.push_back(Vec<N>::identity(a.modulus()));
    if (count >= 1) powers.push_back(a);
    for (std::size_t k = 2; k <= count; ++k) powers.push_back(mul(powers.back(), a, params));
    return powers;
}

template <std::size_t N>
void push_unique(std::vector<Vec<N>>& values, const Vec<N>& v) {
    if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
}

}  // namespace

template <std::size_t N>
PropertyCheck check_power_associativity(const Vec<N>& a, const MagmaParams<N>& params, std::size_t max_n) {
    if (max_n < 3 || max_n > kMaxParenthesizationDegree) {
        throw Error("check_power_associativity: max_n must be in [3, 8]");
    }
    require_same_modulus(a.modulus(), params.modulus, "check_power_associativity");

    // values[k] holds every distinct result over all parenthesizations of
    // the k-fold product; a tree with k leaves splits into (i, k - i).
    std::vector<std::vector<Vec<N>>> values(max_n + 1);
    values[1].push_back(a);
    for (std::size_t k = 2; k <= max_n; ++k) {
        for (std::size_t i = 1; i < k; ++i) {
            for (const auto& left : values[i]) {
                for (const auto& right : values[k - i]) push_unique(values[k], mul(left, right, params));
            }
        }
        if (values[k].size() > 1) {
            std::ostringstream os;
            os << "n=" << k << ": parenthesizations disagree, e.g. " << values[k][0] << " vs " << values[k][1];
            return {false, os.str()};
        }
    }
    return {};
}

template <std::size_t N>
PropertyCheck check_internal_commutativity(const Vec<N>& a, const MagmaParams<N>& params, std::size_t max_m,
                                           std::size_t max_n) {
    const auto powers = iterated_powers(a, std::max(max_m, max_n), params);
    for (std::size_t m = 1; m <= max_m; ++m) {
        for (std::size_t n = 1; n <= max_n; ++n) {
            const auto lhs = mul(powers[m], powers[n], params);
            const auto rhs = mul(powers[n], powers[m], params);
            if (!(lhs == rhs)) {
                std::ostringstream os;
                os << "a^" << m << " * a^" << n << " = " << lhs << " but a^" << n << " * a^" << m << " = " << rhs;
                return {false, os.str()};
            }
        }
    }
    return {};
}

template <std::size_t N>
PropertyCheck check_power_identity(const Vec<N>& a, const MagmaParams<N>& params, std::size_t max_m,
                                   std::size_t max_n) {
    const auto powers = iterated_powers(a, max_m + max_n, params);
    for (std::size_t m = 1; m <= max_m; ++m) {
        for (std::size_t n = 1; n <= max_n; ++n) {
            const auto lhs = mul(powers[m], powers[n], params);
            if (!(lhs == powers[m + n])) {
                std::ostringstream os;
                os << "a^" << m << " * a^" << n << " = " << lhs << " but a^" << (m + n) << " = " << powers[m + n];
                return {false, os.str()};
            }
        }
    }
    return {};
}

template <std::size_t N>
PropertyCheck check_power_of_power(const Vec<N>& a, const MagmaParams<N>& params, std::size_t max_m,
                                   std::size_t max_n) {
    const auto powers = iterated_powers(a, max_m * max_n, params);
    for (std::size_t m = 1; m <= max_m; ++m) {
        for (std::size_t n = 1; n <= max_n; ++n) {
            const auto mn = pow_iter(powers[m], n, params);
            const auto nm = pow_iter(powers[n], m, params);
            if (!(mn == powers[m * n]) || !(nm == powers[m * n])) {
                std::ostringstream os;
                os << "(a^" << m << ")^" << n << " = " << mn << ", (a^" << n << ")^" << m << " = " << nm
                   << ", a^" << (m * n) << " = " << powers[m * n];
                return {false, os.str()};
            }
        }
    }
    return {};
}

#define MLM_INSTANTIATE_POWER(N)                                                                             \
    template Vec<N> pow_iter<N>(const Vec<N>&, std::uint64_t, const MagmaParams<N>&);                       \
    template Vec<N> pow_fast<N>(const Vec<N>&, std::uint64_t, const MagmaParams<N>&);                       \
    template PropertyCheck check_power_associativity<N>(const Vec<N>&, const MagmaParams<N>&, std::size_t); \
    template PropertyCheck check_internal_commutativity<N>(const Vec<N>&, const MagmaParams<N>&,            \
                                                           std::size_t, std::size_t);                       \
    template PropertyCheck check_power_identity<N>(const Vec<N>&, const MagmaParams<N>&, std::size_t,       \
                                                   std::size_t);                                            \
    template PropertyCheck check_power_of_power<N>(const Vec<N>&, const MagmaParams<N>&, std::size_t,       \
                                                   std::size_t);

MLM_INSTANTIATE_POWER(3)
MLM_INSTANTIATE_POWER(4)

#undef MLM_INSTANTIATE_POWER

}  // namespace mlm
