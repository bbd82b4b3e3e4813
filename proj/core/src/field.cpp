#include "mlmagma/field.hpp"

#include <array>

namespace mlm {
namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod64(result, base, m);
        base = mulmod64(base, base, m);
        exp >>= 1;
    }
    return result;
}

}  // namespace

bool is_prime(std::uint64_t n) {
    static constexpr std::array<std::uint64_t, 12> kWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n < 2) return false;
    for (std::uint64_t q : kWitnesses) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : kWitnesses) {
        std::uint64_t x = powmod64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeModulus PrimeModulus::make(std::uint64_t p) {
    if (p < 3 || p >= kMaxExclusive) {
        throw FieldError("modulus " + std::to_string(p) + " outside supported range [3, 2^31)");
    }
    if (!is_prime(p)) {
        throw FieldError("modulus " + std::to_string(p) + " is not prime");
    }
    return PrimeModulus(static_cast<std::uint32_t>(p));
}

Residue PrimeModulus::reduce_signed(std::int64_t x) const {
    std::int64_t r = x % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return Residue{static_cast<std::uint32_t>(r)};
}

Residue PrimeModulus::checked(std::uint64_t x) const {
    if (x >= p_) {
        throw FieldError("value " + std::to_string(x) + " is not a canonical residue mod " + std::to_string(p_));
    }
    return Residue{static_cast<std::uint32_t>(x)};
}

void require_same_modulus(const PrimeModulus& a, const PrimeModulus& b, const char* what) {
    if (a != b) {
        throw FieldError(std::string(what) + ": modulus mismatch (" + std::to_string(a.value()) + " vs " +
                         std::to_string(b.value()) + ")");
    }
}

}  // namespace mlm
