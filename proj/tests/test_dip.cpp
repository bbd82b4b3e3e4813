#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "mlmagma/dip.hpp"
#include "mlmagma/power.hpp"

using namespace mlm;
using testing_helpers::mod;

TEST(Dip, Examples) {
    const auto m = mod(101);
    const Params3 k(m, {1, 1, 1, 1, 1});
    const Vector3 base(m, {1, 0, 0});
    const auto r = dip_bruteforce(DipInstance<3>{base, Vector3(m, {63, 0, 0}), k, 1000});
    ASSERT_TRUE(r.exponent);
    EXPECT_EQ(*r.exponent, 6u);
    EXPECT_EQ(r.steps, 6u);

    const auto one = dip_bruteforce(DipInstance<3>{base, base, k, 10});
    EXPECT_EQ(*one.exponent, 1u);
    EXPECT_EQ(one.steps, 1u);

    // 2^n - 1 = 0 mod 101 needs n = 100, beyond the cap.
    const auto miss = dip_bruteforce(DipInstance<3>{base, identity<3>(m), k, 50});
    EXPECT_FALSE(miss.exponent);
    EXPECT_EQ(miss.steps, 50u);
    EXPECT_FALSE(dip_bruteforce(DipInstance<3>{base, base, k, 0}).exponent);
}

TEST(Dip, RecoveredExponentIsMinimalAndCorrect) {
    Rng rng(67);
    for (int t = 0; t < 100; ++t) {
        const auto m = mod(t % 2 ? 23 : 101);
        const auto k = random_params<3>(rng, m);
        const auto a = random_vector<3>(rng, m);
        const std::uint64_t n = 1 + uniform_below(rng, 300);
        const auto target = pow_fast(a, n, k);
        const auto r = dip_bruteforce(DipInstance<3>{a, target, k, n});
        ASSERT_TRUE(r.exponent);
        ASSERT_LE(*r.exponent, n);
        ASSERT_LE(r.steps, n);
        ASSERT_EQ(pow_iter(a, *r.exponent, k), target);
        for (std::uint64_t j = 1; j < *r.exponent; ++j) ASSERT_FALSE(pow_iter(a, j, k) == target);
    }
}

TEST(Dip, WorksInK4) {
    const auto m = mod(61);
    const Params4 k(m, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    const Vector4 a(m, {1, 2, 3, 4});
    const auto r = dip_bruteforce(DipInstance<4>{a, pow_fast(a, 17, k), k, 100});
    ASSERT_TRUE(r.exponent);
    EXPECT_EQ(pow_iter(a, *r.exponent, k), pow_fast(a, 17, k));
}

TEST(Dip, TimingStepsGrowLinearly) {
    const auto m = mod(2147483647);
    const Params3 k(m, {3, 5, 7, 11, 13});
    const auto rows = dip_timing(k, 3, {1, 256, 512, 1024}, 9);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].mean_steps, 1.0);
    for (const auto& r : rows) EXPECT_LE(r.max_steps, r.exponent);
    EXPECT_NEAR(rows[2].mean_steps / rows[1].mean_steps, 2.0, 0.1);
    EXPECT_NEAR(rows[3].mean_steps / rows[2].mean_steps, 2.0, 0.1);

    std::ostringstream os;
    write_dip_timing_csv(os, rows);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "exponent,samples,mean_steps,min_steps,max_steps");
    std::ostringstream again;
    write_dip_timing_csv(again, dip_timing(k, 3, {1, 256, 512, 1024}, 9));
    EXPECT_EQ(os.str(), again.str());
}
