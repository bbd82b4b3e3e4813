#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mlm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid modulus, or values drawn from two different moduli.
class FieldError : public Error {
public:
    using Error::Error;
};

/// Canonical element of Z_p, always in [0, p).
///
/// A residue does not carry its modulus; composite values (vectors,
/// parameter sets) do, and they reject mixed-modulus arithmetic.
struct Residue {
    std::uint32_t value = 0;

    constexpr auto operator<=>(const Residue&) const = default;
};

/// Deterministic primality test for 64-bit integers (Miller-Rabin with the
/// first twelve primes as witnesses, exact for n < 3.3e24).
bool is_prime(std::uint64_t n);

/// A prime modulus 3 <= p < 2^31. Products of two canonical residues fit in
/// 62 bits, so every reduction works on a plain 64-bit intermediate.
class PrimeModulus {
public:
    static constexpr std::uint64_t kMaxExclusive = std::uint64_t{1} << 31;

    /// Throws FieldError when p is composite or outside [3, 2^31).
    static PrimeModulus make(std::uint64_t p);

    constexpr std::uint32_t value() const { return p_; }

    Residue reduce(std::uint64_t x) const { return Residue{static_cast<std::uint32_t>(x % p_)}; }
    Residue reduce_signed(std::int64_t x) const;
    bool is_canonical(std::uint64_t x) const { return x < p_; }

    /// Throws FieldError unless x < p.
    Residue checked(std::uint64_t x) const;

    Residue add(Residue x, Residue y) const {
        std::uint64_t s = std::uint64_t{x.value} + y.value;
        if (s >= p_) s -= p_;
        return Residue{static_cast<std::uint32_t>(s)};
    }
    Residue sub(Residue x, Residue y) const {
        return Residue{x.value >= y.value ? x.value - y.value
                                          : static_cast<std::uint32_t>(std::uint64_t{x.value} + p_ - y.value)};
    }
    Residue mul(Residue x, Residue y) const {
        return Residue{static_cast<std::uint32_t>((std::uint64_t{x.value} * y.value) % p_)};
    }

    constexpr bool operator==(const PrimeModulus&) const = default;

private:
    explicit constexpr PrimeModulus(std::uint32_t p) : p_(p) {}
    std::uint32_t p_;
};

inline PrimeModulus make_modulus(std::uint64_t p) { return PrimeModulus::make(p); }
inline Residue mod_add(Residue x, Residue y, const PrimeModulus& m) { return m.add(x, y); }
inline Residue mod_sub(Residue x, Residue y, const PrimeModulus& m) { return m.sub(x, y); }
inline Residue mod_mul(Residue x, Residue y, const PrimeModulus& m) { return m.mul(x, y); }

/// Throws FieldError naming `what` when the moduli differ.
void require_same_modulus(const PrimeModulus& a, const PrimeModulus& b, const char* what);

}  // namespace mlm
