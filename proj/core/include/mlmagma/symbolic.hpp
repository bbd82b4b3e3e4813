#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlmagma/field.hpp"

namespace mlm::sym {

/// Polynomial variables, in canonical order.
enum class Var : std::uint8_t { a0, a1, a2, A, B, C, D, E };
inline constexpr std::size_t kVarCount = 8;
inline constexpr std::array<const char*, kVarCount> kVarNames = {"a0", "a1", "a2", "A", "B", "C", "D", "E"};

using Exponents = std::array<std::uint8_t, kVarCount>;

/// Coefficient arithmetic overflowed 64 bits.
class OverflowError : public Error {
public:
    using Error::Error;
};

struct Monomial {
    Exponents exponents{};
    std::int64_t coefficient = 0;

    bool operator==(const Monomial&) const = default;
};

/// Graded lexicographic "greater than": higher total degree first, then
/// lexicographic in variable order.
struct GrlexGreater {
    bool operator()(const Exponents& x, const Exponents& y) const;
};

/// Sparse polynomial with integer coefficients over a0, a1, a2, A, ..., E.
/// Zero coefficients are never stored; terms are kept in grlex order, so
/// equality is structural.
class Poly {
public:
    Poly() = default;

    static Poly constant(std::int64_t c);
    static Poly variable(Var v);

    /// Terms, highest grlex first.
    std::vector<Monomial> terms() const;
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    /// 0 when the monomial is absent.
    std::int64_t coefficient(const Exponents& e) const;

    /// Maximum total degree in a0, a1, a2 (parameters excluded); -1 for 0.
    int a_degree() const;

    /// Every term contains v at least once.
    bool divisible_by(Var v) const;

    /// Value mod p at the given point, in canonical variable order.
    Residue evaluate(const std::array<Residue, kVarCount>& point, const PrimeModulus& m) const;

    /// Human-readable sum, e.g. "a0^2 + 2*a0 + A*a1^2".
    std::string to_string() const;

    /// One line per term: coefficient then the eight exponents, separated
    /// by single spaces, in canonical order.
    std::string to_listing() const;

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    friend Poly operator+(Poly x, const Poly& y) { return x += y; }
    friend Poly operator-(Poly x, const Poly& y) { return x -= y; }
    friend Poly operator*(const Poly& x, const Poly& y);
    friend Poly operator*(std::int64_t c, const Poly& x);

    bool operator==(const Poly&) const = default;

private:
    void add_term(const Exponents& e, std::int64_t c);

    std::map<Exponents, std::int64_t, GrlexGreater> terms_;
};

/// Number of distinct monomials (parameters included).
std::size_t monomial_count(const Poly& p);

/// Number of distinct monomials in a0, a1, a2 once parameter-dependent
/// coefficients are collected.
std::size_t a_monomial_count(const Poly& p);

/// binom(n+3, 3) - 1: number of monomials in three variables of degree 1..n.
std::uint64_t a_monomial_bound(unsigned n);

using SymVector3 = std::array<Poly, 3>;

/// The generic vector (a0, a1, a2).
SymVector3 generic_vector();

SymVector3 zero_vector();

/// K^3 product with symbolic entries and symbolic coefficients A..E.
SymVector3 sym_mul3(const SymVector3& x, const SymVector3& y);

/// (g(x), x1 h(x), x2 h(x)).
SymVector3 sym_square_gh(const SymVector3& x);

inline constexpr unsigned kMaxSymbolicPower = 8;

/// Left-associative power of the generic vector, 1 <= n <= 8.
SymVector3 sym_pow(unsigned n);

/// The closed forms of a^2 and a^3 as printed in the literature, built
/// from their factored expressions. For the two vector components of a^3
/// the common factor is read as
///   3(a0+1)^2 + (A+D^2)a1^2 + (B+E^2)a2^2 + 3(D a1 + E a2)(a0+1) + (C+2DE)a1 a2.
SymVector3 reference_a2();
SymVector3 reference_a3();

/// True iff every parenthesization of the n-fold symbolic product agrees,
/// for each 1 <= n <= max_n (max_n <= 6).
bool symbolic_power_associative(unsigned max_n);

/// Evaluates a symbolic vector at a numeric point (a0, a1, a2) with
/// parameters (A..E).
std::array<Residue, 3> evaluate(const SymVector3& v, const std::array<Residue, 3>& a,
                                const std::array<Residue, 5>& params, const PrimeModulus& m);

}  // namespace mlm::sym
