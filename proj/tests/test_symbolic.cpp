#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mlmagma/power.hpp"
#include "mlmagma/symbolic.hpp"
#include "printed_forms.hpp"

using namespace mlm;
using namespace mlm::sym;
using oracle::Printed;

namespace {

Exponents ex(std::initializer_list<int> e) {
    Exponents r{};
    std::size_t i = 0;
    for (int v : e) r[i++] = static_cast<std::uint8_t>(v);
    return r;
}

}  // namespace

TEST(Symbolic, PowOneIsGeneric) {
    EXPECT_EQ(sym_pow(1), generic_vector());
    EXPECT_EQ(sym_mul3(generic_vector(), zero_vector()), generic_vector());
    EXPECT_EQ(sym_mul3(zero_vector(), generic_vector()), generic_vector());
}

TEST(Symbolic, SquareMatchesPrintedForm) {
    const Printed pr;
    const auto a2 = sym_pow(2);
    EXPECT_EQ(a2, pr.square());
    EXPECT_EQ(a2, sym_square_gh(generic_vector()));
    EXPECT_EQ(a2, reference_a2());
    EXPECT_EQ(a_monomial_count(a2[0]), 5u);
    // {a0^2, a0, a1^2, a2^2, a1 a2}
    EXPECT_EQ(a2[0].coefficient(ex({2})), 1);
    EXPECT_EQ(a2[0].coefficient(ex({1})), 2);
    EXPECT_EQ(a2[0].coefficient(ex({0, 2, 0, 1})), 1);
    EXPECT_EQ(a2[0].coefficient(ex({0, 0, 2, 0, 1})), 1);
    EXPECT_EQ(a2[0].coefficient(ex({0, 1, 1, 0, 0, 1})), 1);
}

TEST(Symbolic, CubeMatchesPrintedForm) {
    const Printed pr;
    const auto a3 = sym_pow(3);
    EXPECT_EQ(a3[0], pr.cube0());
    EXPECT_EQ(a3[1], pr.a1 * pr.cube_common());
    EXPECT_EQ(a3[2], pr.a2 * pr.cube_common());
    EXPECT_EQ(a3, reference_a3());

    // A D a1^3 with coefficient 1, and (AE + CD) a1^2 a2.
    EXPECT_EQ(a3[0].coefficient(ex({0, 3, 0, 1, 0, 0, 1, 0})), 1);
    EXPECT_EQ(a3[0].coefficient(ex({0, 2, 1, 1, 0, 0, 0, 1})), 1);
    EXPECT_EQ(a3[0].coefficient(ex({0, 2, 1, 0, 0, 1, 1, 0})), 1);
}

TEST(Symbolic, ReferenceCubeComponentsShareFactor) {
    const auto r = reference_a3();
    EXPECT_TRUE(r[1].divisible_by(Var::a1));
    EXPECT_TRUE(r[2].divisible_by(Var::a2));
    // Swapping a1 for a2 in the leading factor only: component 1 times a2
    // equals component 2 times a1.
    EXPECT_EQ(r[1] * Poly::variable(Var::a2), r[2] * Poly::variable(Var::a1));
}

TEST(Symbolic, DegreeGrowsLinearly) {
    for (unsigned n = 1; n <= 6; ++n) {
        const auto v = sym_pow(n);
        for (const auto& c : v) EXPECT_EQ(c.a_degree(), static_cast<int>(n)) << "n=" << n;
    }
}

TEST(Symbolic, VectorComponentsDivisible) {
    for (unsigned n = 1; n <= kMaxSymbolicPower; ++n) {
        const auto v = sym_pow(n);
        EXPECT_TRUE(v[1].divisible_by(Var::a1)) << n;
        EXPECT_TRUE(v[2].divisible_by(Var::a2)) << n;
    }
}

TEST(Symbolic, MonomialCounts) {
    // Counts of (a^n)_0 from an independent expansion in a computer algebra
    // system.
    const std::size_t a_counts[] = {1, 5, 13, 26, 45, 71};
    const std::size_t full_counts[] = {1, 5, 15, 40, 89, 181};
    std::size_t prev = 0;
    for (unsigned n = 1; n <= 6; ++n) {
        const auto v = sym_pow(n);
        EXPECT_EQ(a_monomial_count(v[0]), a_counts[n - 1]) << n;
        EXPECT_EQ(monomial_count(v[0]), full_counts[n - 1]) << n;
        EXPECT_LE(a_monomial_count(v[0]), a_monomial_bound(n));
        EXPECT_GT(a_monomial_count(v[0]), prev);
        prev = a_monomial_count(v[0]);
    }
    EXPECT_EQ(a_monomial_bound(2), 9u);
    EXPECT_EQ(a_monomial_bound(6), 83u);
}

TEST(Symbolic, PowerAssociativeUpToFive) {
    EXPECT_TRUE(symbolic_power_associative(5));
}

TEST(Symbolic, NumericAgreementWithPowIter) {
    Rng rng(47);
    for (std::uint64_t p : {23ull, 101ull, 2147483647ull}) {
        const auto m = PrimeModulus::make(p);
        std::vector<SymVector3> powers;
        for (unsigned n = 1; n <= 6; ++n) powers.push_back(sym_pow(n));
        for (int t = 0; t < 100; ++t) {
            const auto k = random_params<3>(rng, m);
            const auto a = random_vector<3>(rng, m);
            for (unsigned n = 1; n <= 6; ++n) {
                const auto sym = evaluate(powers[n - 1], a.components(), k.coeffs, m);
                ASSERT_EQ(Vector3(m, sym), pow_iter(a, n, k)) << "p=" << p << " n=" << n;
            }
        }
    }
}

TEST(Symbolic, EvaluateSinglePoly) {
    const Printed pr;
    const Poly f = 3 * pr.a0 * pr.a1 - pr.E;
    std::array<Residue, kVarCount> point{};
    point[0] = Residue{2};
    point[1] = Residue{5};
    point[7] = Residue{40};
    EXPECT_EQ(f.evaluate(point, PrimeModulus::make(7)).value, (30 + 7 * 10 - 40) % 7u);
}

TEST(Symbolic, ListingFormat) {
    const auto listing = sym_pow(1)[0].to_listing();
    EXPECT_EQ(listing, "1 1 0 0 0 0 0 0 0\n");
    EXPECT_EQ((Poly::variable(Var::a0) + Poly::constant(-1)).to_string(), "a0 - 1");
}

TEST(Symbolic, OverflowDetected) {
    Poly big = Poly::constant(INT64_MAX);
    EXPECT_THROW(big + Poly::constant(1), OverflowError);
    EXPECT_THROW(2 * big, OverflowError);
    EXPECT_THROW(sym_pow(9), Error);
    EXPECT_THROW(sym_pow(0), Error);
}
