#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <string>

#include "mlmagma/field.hpp"

namespace mlm {

/// Element of Z_p^N. Carries its modulus so that cross-modulus products are
/// caught instead of silently computed.
template <std::size_t N>
class Vec {
public:
    static constexpr std::size_t kDim = N;

    explicit Vec(PrimeModulus m) : modulus_(m) {}

    /// Components are reduced mod p.
    Vec(PrimeModulus m, std::initializer_list<std::uint64_t> values) : modulus_(m) {
        if (values.size() != N) throw Error("vector needs exactly " + std::to_string(N) + " components");
        std::size_t i = 0;
        for (std::uint64_t v : values) c_[i++] = m.reduce(v);
    }
    Vec(PrimeModulus m, const std::array<Residue, N>& c) : modulus_(m), c_(c) {}

    static Vec identity(PrimeModulus m) { return Vec(m); }

    const PrimeModulus& modulus() const { return modulus_; }
    Residue operator[](std::size_t i) const { return c_[i]; }
    Residue& operator[](std::size_t i) { return c_[i]; }
    std::uint32_t value(std::size_t i) const { return c_[i].value; }
    const std::array<Residue, N>& components() const { return c_; }

    bool is_identity() const {
        for (const auto& r : c_)
            if (r.value != 0) return false;
        return true;
    }

    /// Dense index in [0, p^N), first component most significant.
    std::uint64_t index() const {
        std::uint64_t idx = 0;
        for (const auto& r : c_) idx = idx * modulus_.value() + r.value;
        return idx;
    }
    static Vec from_index(PrimeModulus m, std::uint64_t idx) {
        Vec v(m);
        for (std::size_t i = N; i-- > 0;) {
            v.c_[i] = Residue{static_cast<std::uint32_t>(idx % m.value())};
            idx /= m.value();
        }
        return v;
    }

    bool operator==(const Vec& o) const { return modulus_ == o.modulus_ && c_ == o.c_; }
    /// Component-lexicographic; only meaningful within one modulus.
    bool operator<(const Vec& o) const { return c_ < o.c_; }

    std::string to_string() const;

private:
    PrimeModulus modulus_;
    std::array<Residue, N> c_{};
};

using Vector3 = Vec<3>;
using Vector4 = Vec<4>;

template <std::size_t N>
std::ostream& operator<<(std::ostream& os, const Vec<N>& v);

/// Coefficients of the product: (A, B, C, D, E) for N = 3 and
/// (A, ..., I) for N = 4.
template <std::size_t N>
struct MagmaParams {
    static constexpr std::size_t kCount = N == 3 ? 5 : 9;
    static_assert(N == 3 || N == 4, "only K^3 and K^4 are supported");

    PrimeModulus modulus;
    std::array<Residue, kCount> coeffs{};

    explicit MagmaParams(PrimeModulus m) : modulus(m) {}
    MagmaParams(PrimeModulus m, std::initializer_list<std::uint64_t> values) : modulus(m) {
        if (values.size() != kCount) {
            throw Error("parameter set needs exactly " + std::to_string(kCount) + " coefficients");
        }
        std::size_t i = 0;
        for (std::uint64_t v : values) coeffs[i++] = m.reduce(v);
    }
    MagmaParams(PrimeModulus m, const std::array<Residue, kCount>& c) : modulus(m), coeffs(c) {}

    Residue operator[](std::size_t i) const { return coeffs[i]; }
    bool operator==(const MagmaParams&) const = default;
    std::string to_string() const;
};

using Params3 = MagmaParams<3>;
using Params4 = MagmaParams<4>;

/// (ab)_0 = a0 + b0 + a0 b0 + A a1 b1 + C a2 b1 + B a2 b2
/// (ab)_1 = a1 + b1 + a1 b0 + a0 b1 + D a1 b1 + E a1 b2
/// (ab)_2 = a2 + b2 + a2 b0 + a0 b2 + D a2 b1 + E a2 b2
Vector3 mul3(const Vector3& a, const Vector3& b, const Params3& params);

/// K^4 analogue with coefficients A..F on the scalar row and G, H, I on the
/// three vector rows.
Vector4 mul4(const Vector4& a, const Vector4& b, const Params4& params);

/// Closed-form square a^2 = (g(a), a1 h(a), a2 h(a)).
Vector3 square3_gh(const Vector3& a, const Params3& params);
Vector4 square4_gh(const Vector4& a, const Params4& params);

/// The scalar functions of the closed-form square.
Residue g3(const Vector3& a, const Params3& params);
Residue h3(const Vector3& a, const Params3& params);

inline Vector3 mul(const Vector3& a, const Vector3& b, const Params3& p) { return mul3(a, b, p); }
inline Vector4 mul(const Vector4& a, const Vector4& b, const Params4& p) { return mul4(a, b, p); }
inline Vector3 square_gh(const Vector3& a, const Params3& p) { return square3_gh(a, p); }
inline Vector4 square_gh(const Vector4& a, const Params4& p) { return square4_gh(a, p); }

template <std::size_t N>
Vec<N> identity(PrimeModulus m) {
    return Vec<N>::identity(m);
}

/// Unchecked K^3 product on raw residues, for hot loops that have already
/// validated the modulus. Same formula as mul3.
class Mul3Kernel {
public:
    explicit Mul3Kernel(const Params3& params);

    std::array<std::uint32_t, 3> operator()(const std::array<std::uint32_t, 3>& a,
                                            const std::array<std::uint32_t, 3>& b) const;

    std::uint32_t p() const { return p_; }

private:
    std::uint64_t p_;
    std::uint64_t A_, B_, C_, D_, E_;
};

}  // namespace mlm
