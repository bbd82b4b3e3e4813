#include "mlmagma/symbolic.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace mlm::sym {
namespace {

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_add_overflow(x, y, &r)) throw OverflowError("symbolic coefficient overflow in addition");
    return r;
}

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
    std::int64_t r;
    if (__builtin_mul_overflow(x, y, &r)) throw OverflowError("symbolic coefficient overflow in multiplication");
    return r;
}

unsigned total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), 0u);
}

}  // namespace

bool GrlexGreater::operator()(const Exponents& x, const Exponents& y) const {
    const unsigned dx = total_degree(x), dy = total_degree(y);
    if (dx != dy) return dx > dy;
    return x > y;
}

Poly Poly::constant(std::int64_t c) {
    Poly p;
    p.add_term(Exponents{}, c);
    return p;
}

Poly Poly::variable(Var v) {
    Exponents e{};
    e[static_cast<std::size_t>(v)] = 1;
    Poly p;
    p.add_term(e, 1);
    return p;
}

void Poly::add_term(const Exponents& e, std::int64_t c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second = checked_add(it->second, c);
        if (it->second == 0) terms_.erase(it);
    }
}

std::vector<Monomial> Poly::terms() const {
    std::vector<Monomial> out;
    out.reserve(terms_.size());
    for (const auto& [e, c] : terms_) out.push_back({e, c});
    return out;
}

std::int64_t Poly::coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0 : it->second;
}

int Poly::a_degree() const {
    int best = -1;
    for (const auto& [e, c] : terms_) best = std::max(best, int(e[0]) + int(e[1]) + int(e[2]));
    return best;
}

bool Poly::divisible_by(Var v) const {
    const auto idx = static_cast<std::size_t>(v);
    return std::all_of(terms_.begin(), terms_.end(), [idx](const auto& t) { return t.first[idx] > 0; });
}

Residue Poly::evaluate(const std::array<Residue, kVarCount>& point, const PrimeModulus& m) const {
    Residue total{0};
    for (const auto& [e, c] : terms_) {
        Residue term = m.reduce_signed(c);
        for (std::size_t v = 0; v < kVarCount; ++v) {
            for (unsigned k = 0; k < e[v]; ++k) term = m.mul(term, point[v]);
        }
        total = m.add(total, term);
    }
    return total;
}

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        std::int64_t mag = c < 0 ? -c : c;
        if (first) {
            if (c < 0) os << '-';
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool has_var = total_degree(e) > 0;
        bool wrote = false;
        if (mag != 1 || !has_var) {
            os << mag;
            wrote = true;
        }
        for (std::size_t v = 0; v < kVarCount; ++v) {
            if (e[v] == 0) continue;
            if (wrote) os << '*';
            os << kVarNames[v];
            if (e[v] > 1) os << '^' << int(e[v]);
            wrote = true;
        }
    }
    return os.str();
}

std::string Poly::to_listing() const {
    std::ostringstream os;
    for (const auto& [e, c] : terms_) {
        os << c;
        for (auto x : e) os << ' ' << int(x);
        os << '\n';
    }
    return os.str();
}

Poly& Poly::operator+=(const Poly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, checked_mul(c, -1));
    return *this;
}

Poly operator*(const Poly& x, const Poly& y) {
    Poly out;
    for (const auto& [ex, cx] : x.terms_) {
        for (const auto& [ey, cy] : y.terms_) {
            Exponents e{};
            for (std::size_t v = 0; v < kVarCount; ++v) {
                const unsigned s = unsigned(ex[v]) + ey[v];
                if (s > 255) throw OverflowError("symbolic exponent overflow");
                e[v] = static_cast<std::uint8_t>(s);
            }
            out.add_term(e, checked_mul(cx, cy));
        }
    }
    return out;
}

Poly operator*(std::int64_t c, const Poly& x) {
    return Poly::constant(c) * x;
}

std::size_t monomial_count(const Poly& p) {
    return p.size();
}

std::size_t a_monomial_count(const Poly& p) {
    // Distinct parameter monomials never cancel each other, so the collected
    // coefficient of an a-monomial is nonzero iff it occurs at all.
    std::set<std::array<std::uint8_t, 3>> seen;
    for (const auto& t : p.terms()) seen.insert({t.exponents[0], t.exponents[1], t.exponents[2]});
    return seen.size();
}

std::uint64_t a_monomial_bound(unsigned n) {
    const std::uint64_t m = n + 3;
    return m * (m - 1) * (m - 2) / 6 - 1;
}

SymVector3 generic_vector() {
    return {Poly::variable(Var::a0), Poly::variable(Var::a1), Poly::variable(Var::a2)};
}

SymVector3 zero_vector() {
    return {Poly{}, Poly{}, Poly{}};
}

SymVector3 sym_mul3(const SymVector3& x, const SymVector3& y) {
    const Poly A = Poly::variable(Var::A), B = Poly::variable(Var::B), C = Poly::variable(Var::C),
               D = Poly::variable(Var::D), E = Poly::variable(Var::E);
    const auto& [x0, x1, x2] = x;
    const auto& [y0, y1, y2] = y;
    return {
        x0 + y0 + x0 * y0 + A * (x1 * y1) + C * (x2 * y1) + B * (x2 * y2),
        x1 + y1 + x1 * y0 + x0 * y1 + D * (x1 * y1) + E * (x1 * y2),
        x2 + y2 + x2 * y0 + x0 * y2 + D * (x2 * y1) + E * (x2 * y2),
    };
}

SymVector3 sym_square_gh(const SymVector3& x) {
    const Poly A = Poly::variable(Var::A), B = Poly::variable(Var::B), C = Poly::variable(Var::C),
               D = Poly::variable(Var::D), E = Poly::variable(Var::E);
    const Poly one = Poly::constant(1);
    const Poly u = x[0] + one;
    const Poly g = u * u + A * x[1] * x[1] + B * x[2] * x[2] + C * x[1] * x[2] - one;
    const Poly h = D * x[1] + E * x[2] + 2 * u;
    return {g, x[1] * h, x[2] * h};
}

SymVector3 sym_pow(unsigned n) {
    if (n < 1 || n > kMaxSymbolicPower) throw Error("sym_pow: n must be in [1, 8]");
    const SymVector3 a = generic_vector();
    SymVector3 acc = a;
    for (unsigned k = 1; k < n; ++k) acc = sym_mul3(acc, a);
    return acc;
}

SymVector3 reference_a2() {
    const Poly a0 = Poly::variable(Var::a0), a1 = Poly::variable(Var::a1), a2 = Poly::variable(Var::a2);
    const Poly A = Poly::variable(Var::A), B = Poly::variable(Var::B), C = Poly::variable(Var::C),
               D = Poly::variable(Var::D), E = Poly::variable(Var::E);
    const Poly one = Poly::constant(1);
    const Poly u = a0 + one;
    const Poly factor = D * a1 + E * a2 + 2 * u;
    return {u * u + A * a1 * a1 + B * a2 * a2 + C * a1 * a2 - one, a1 * factor, a2 * factor};
}

SymVector3 reference_a3() {
    const Poly a0 = Poly::variable(Var::a0), a1 = Poly::variable(Var::a1), a2 = Poly::variable(Var::a2);
    const Poly A = Poly::variable(Var::A), B = Poly::variable(Var::B), C = Poly::variable(Var::C),
               D = Poly::variable(Var::D), E = Poly::variable(Var::E);
    const Poly one = Poly::constant(1);
    const Poly u = a0 + one;

    Poly c0 = u * u * u + A * D * a1 * a1 * a1 + B * E * a2 * a2 * a2;
    c0 += 3 * a0 * (A * a1 * a1 + B * a2 * a2) + 3 * C * a0 * a1 * a2;
    c0 += (A * E + C * D) * a1 * a1 * a2 + (B * D + C * E) * a1 * a2 * a2;
    c0 += 3 * A * a1 * a1 + 3 * B * a2 * a2 + 3 * C * a1 * a2 - one;

    const Poly factor = 3 * u * u + (A + D * D) * a1 * a1 + (B + E * E) * a2 * a2 + 3 * (D * a1 + E * a2) * u +
                        (C + 2 * D * E) * a1 * a2;
    return {c0, a1 * factor, a2 * factor};
}

bool symbolic_power_associative(unsigned max_n) {
    if (max_n > 6) throw Error("symbolic_power_associative: max_n must be <= 6");
    std::vector<std::vector<SymVector3>> values(max_n + 1);
    if (max_n == 0) return true;
    values[1].push_back(generic_vector());
    for (unsigned k = 2; k <= max_n; ++k) {
        for (unsigned i = 1; i < k; ++i) {
            for (const auto& l : values[i]) {
                for (const auto& r : values[k - i]) {
                    auto v = sym_mul3(l, r);
                    if (std::find(values[k].begin(), values[k].end(), v) == values[k].end()) {
                        values[k].push_back(std::move(v));
                    }
                }
            }
        }
        if (values[k].size() != 1) return false;
    }
    return true;
}

std::array<Residue, 3> evaluate(const SymVector3& v, const std::array<Residue, 3>& a,
                                const std::array<Residue, 5>& params, const PrimeModulus& m) {
    const std::array<Residue, kVarCount> point = {a[0],      a[1],      a[2],      params[0],
                                                  params[1], params[2], params[3], params[4]};
    return {v[0].evaluate(point, m), v[1].evaluate(point, m), v[2].evaluate(point, m)};
}

}  // namespace mlm::sym
