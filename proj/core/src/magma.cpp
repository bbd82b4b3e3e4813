#include "mlmagma/magma.hpp"

#include <ostream>
#include <sstream>

namespace mlm {
namespace {

template <std::size_t N, class Coeffs>
std::string join_residues(const Coeffs& c) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) os << ',';
        os << c[i].value;
    }
    os << ')';
    return os.str();
}

}  // namespace

template <std::size_t N>
std::string Vec<N>::to_string() const {
    return join_residues<N>(c_);
}

template <std::size_t N>
std::ostream& operator<<(std::ostream& os, const Vec<N>& v) {
    return os << v.to_string();
}

template <std::size_t N>
std::string MagmaParams<N>::to_string() const {
    return join_residues<N>(coeffs);
}

template class Vec<3>;
template class Vec<4>;
template struct MagmaParams<3>;
template struct MagmaParams<4>;
template std::ostream& operator<<(std::ostream&, const Vec<3>&);
template std::ostream& operator<<(std::ostream&, const Vec<4>&);

Mul3Kernel::Mul3Kernel(const Params3& params)
    : p_(params.modulus.value()),
      A_(params[0].value),
      B_(params[1].value),
      C_(params[2].value),
      D_(params[3].value),
      E_(params[4].value) {}

std::array<std::uint32_t, 3> Mul3Kernel::operator()(const std::array<std::uint32_t, 3>& a,
                                                    const std::array<std::uint32_t, 3>& b) const {
    const std::uint64_t p = p_;
    const std::uint64_t a0 = a[0], a1 = a[1], a2 = a[2];
    const std::uint64_t b0 = b[0], b1 = b[1], b2 = b[2];

    // Every summand is reduced below p < 2^31, so six of them cannot overflow.
    const std::uint64_t a1b1 = a1 * b1 % p;
    const std::uint64_t a2b1 = a2 * b1 % p;
    const std::uint64_t a1b2 = a1 * b2 % p;
    const std::uint64_t a2b2 = a2 * b2 % p;

    const std::uint64_t c0 =
        (a0 + b0 + a0 * b0 % p + A_ * a1b1 % p + C_ * a2b1 % p + B_ * a2b2 % p) % p;
    const std::uint64_t c1 =
        (a1 + b1 + a1 * b0 % p + a0 * b1 % p + D_ * a1b1 % p + E_ * a1b2 % p) % p;
    const std::uint64_t c2 =
        (a2 + b2 + a2 * b0 % p + a0 * b2 % p + D_ * a2b1 % p + E_ * a2b2 % p) % p;

    return {static_cast<std::uint32_t>(c0), static_cast<std::uint32_t>(c1), static_cast<std::uint32_t>(c2)};
}

Vector3 mul3(const Vector3& a, const Vector3& b, const Params3& params) {
    require_same_modulus(a.modulus(), b.modulus(), "mul3");
    require_same_modulus(a.modulus(), params.modulus, "mul3");
    const Mul3Kernel kernel(params);
    const auto r = kernel({a.value(0), a.value(1), a.value(2)}, {b.value(0), b.value(1), b.value(2)});
    return Vector3(a.modulus(), {Residue{r[0]}, Residue{r[1]}, Residue{r[2]}});
}

Vector4 mul4(const Vector4& a, const Vector4& b, const Params4& params) {
    require_same_modulus(a.modulus(), b.modulus(), "mul4");
    require_same_modulus(a.modulus(), params.modulus, "mul4");
    const PrimeModulus& m = a.modulus();
    const auto& k = params.coeffs;
    enum { A, B, C, D, E, F, G, H, I };

    auto prod = [&](Residue x, Residue y) { return m.mul(x, y); };
    auto term = [&](Residue coeff, Residue x, Residue y) { return m.mul(coeff, m.mul(x, y)); };

    Vector4 out(m);
    Residue s0 = m.add(m.add(a[0], b[0]), prod(a[0], b[0]));
    s0 = m.add(s0, term(k[A], a[1], b[1]));
    s0 = m.add(s0, term(k[E], a[3], b[1]));
    s0 = m.add(s0, term(k[B], a[2], b[2]));
    s0 = m.add(s0, term(k[D], a[1], b[2]));
    s0 = m.add(s0, term(k[F], a[3], b[2]));
    s0 = m.add(s0, term(k[C], a[3], b[3]));
    out[0] = s0;

    for (std::size_t i = 1; i < 4; ++i) {
        Residue s = m.add(a[i], b[i]);
        s = m.add(s, prod(a[i], b[0]));
        s = m.add(s, prod(a[0], b[i]));
        s = m.add(s, term(k[G], a[i], b[1]));
        s = m.add(s, term(k[H], a[i], b[2]));
        s = m.add(s, term(k[I], a[i], b[3]));
        out[i] = s;
    }
    return out;
}

Residue g3(const Vector3& a, const Params3& params) {
    require_same_modulus(a.modulus(), params.modulus, "g3");
    const PrimeModulus& m = a.modulus();
    const Residue one{1};
    const Residue u = m.add(a[0], one);
    Residue g = m.mul(u, u);
    g = m.add(g, m.mul(params[0], m.mul(a[1], a[1])));
    g = m.add(g, m.mul(params[1], m.mul(a[2], a[2])));
    g = m.add(g, m.mul(params[2], m.mul(a[1], a[2])));
    return m.sub(g, one);
}

Residue h3(const Vector3& a, const Params3& params) {
    require_same_modulus(a.modulus(), params.modulus, "h3");
    const PrimeModulus& m = a.modulus();
    const Residue u = m.add(a[0], Residue{1});
    Residue h = m.add(m.mul(params[3], a[1]), m.mul(params[4], a[2]));
    return m.add(h, m.add(u, u));
}

Vector3 square3_gh(const Vector3& a, const Params3& params) {
    const PrimeModulus& m = a.modulus();
    const Residue h = h3(a, params);
    return Vector3(m, {g3(a, params), m.mul(a[1], h), m.mul(a[2], h)});
}

Vector4 square4_gh(const Vector4& a, const Params4& params) {
    require_same_modulus(a.modulus(), params.modulus, "square4_gh");
    const PrimeModulus& m = a.modulus();
    const auto& k = params.coeffs;
    enum { A, B, C, D, E, F, G, H, I };

    const Residue one{1};
    const Residue u = m.add(a[0], one);
    Residue g = m.mul(u, u);
    g = m.add(g, m.mul(k[A], m.mul(a[1], a[1])));
    g = m.add(g, m.mul(k[B], m.mul(a[2], a[2])));
    g = m.add(g, m.mul(k[C], m.mul(a[3], a[3])));
    g = m.add(g, m.mul(k[D], m.mul(a[1], a[2])));
    g = m.add(g, m.mul(k[E], m.mul(a[1], a[3])));
    g = m.add(g, m.mul(k[F], m.mul(a[2], a[3])));
    g = m.sub(g, one);

    Residue h = m.add(m.mul(k[G], a[1]), m.mul(k[H], a[2]));
    h = m.add(h, m.mul(k[I], a[3]));
    h = m.add(h, m.add(u, u));

    return Vector4(m, {g, m.mul(a[1], h), m.mul(a[2], h), m.mul(a[3], h)});
}

}  // namespace mlm
