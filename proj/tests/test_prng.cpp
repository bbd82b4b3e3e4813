#include <gtest/gtest.h>

#include <unordered_map>

#include "helpers.hpp"
#include "mlmagma/power.hpp"
#include "mlmagma/prng.hpp"

using namespace mlm;
using testing_helpers::mod;
using testing_helpers::raw;

namespace {

PrngConfig make_config(std::uint64_t p, std::initializer_list<std::uint64_t> k, std::vector<Vector3> seeds,
                       std::vector<std::size_t> pattern, Vector3 initial, MultiplySide side = MultiplySide::right) {
    const auto m = mod(p);
    return PrngConfig{Params3(m, k), std::move(seeds), std::move(pattern), initial, side};
}

// Composite-state cycle by hash-set walk on raw arrays.
std::pair<std::uint64_t, std::uint64_t> oracle_cycle(const PrngConfig& c) {
    const std::int64_t p = c.p();
    const auto k = raw(c.params);
    const std::int64_t L = static_cast<std::int64_t>(c.pattern.size());
    std::unordered_map<std::int64_t, std::uint64_t> seen;
    oracle::V3 x = raw(c.initial);
    std::int64_t pos = 0;
    for (std::uint64_t i = 0;; ++i) {
        const std::int64_t id = ((x[0] * p + x[1]) * p + x[2]) * L + pos;
        auto [it, inserted] = seen.emplace(id, i);
        if (!inserted) return {it->second, i - it->second};
        const auto s = raw(c.seeds[c.pattern[static_cast<std::size_t>(pos)]]);
        x = c.side == MultiplySide::right ? oracle::mul3(x, s, k, p) : oracle::mul3(s, x, k, p);
        pos = (pos + 1) % L;
    }
}

}  // namespace

TEST(Prng, InitAndValidation) {
    const auto m = mod(23);
    const auto c = make_config(23, {1, 1, 1, 1, 1}, {identity<3>(m)}, {0}, Vector3(m, {1, 2, 3}));
    const auto s = prng_init(c);
    EXPECT_EQ(s.current, Vector3(m, {1, 2, 3}));
    EXPECT_EQ(s.pos, 0u);

    auto bad = make_config(23, {1, 1, 1, 1, 1}, {identity<3>(m), identity<3>(m)}, {0, 5}, identity<3>(m));
    EXPECT_THROW(prng_init(bad), PrngError);
    bad.pattern = {};
    EXPECT_THROW(validate(bad), PrngError);
    auto mixed = make_config(23, {1, 1, 1, 1, 1}, {Vector3(mod(29), {1, 0, 0})}, {0}, identity<3>(m));
    EXPECT_THROW(validate(mixed), Error);
}

TEST(Prng, JsonRoundTrip) {
    const auto m = mod(37);
    const auto c = make_config(37, {1, 2, 3, 4, 5}, {Vector3(m, {0, 1, 5}), Vector3(m, {0, 2, 7})}, {0, 0, 1},
                               Vector3(m, {1, 2, 3}), MultiplySide::left);
    const auto text = prng_config_to_json(c);
    const auto back = prng_config_from_json(text);
    EXPECT_EQ(prng_config_to_json(back), text);
    EXPECT_EQ(back.seeds, c.seeds);
    EXPECT_EQ(back.pattern, c.pattern);
    EXPECT_EQ(back.side, MultiplySide::left);
    EXPECT_THROW(prng_config_from_json(R"({"p":37,"params":[1,2,3,4,5],"seeds":[[0,1,5]],"pattern":[0],)"
                                       R"("initial":[1,2,3],"colour":1})"),
                 PrngError);
    EXPECT_THROW(prng_config_from_json("[1,2]"), PrngError);
    EXPECT_THROW(prng_config_from_json("{"), PrngError);
}

TEST(Prng, IdentitySeedIsConstant) {
    const auto m = mod(23);
    const auto c = make_config(23, {9, 19, 1, 1, 2}, {identity<3>(m)}, {0}, Vector3(m, {4, 5, 6}));
    auto s = prng_init(c);
    for (int i = 0; i < 50; ++i) ASSERT_EQ(prng_step(s, c), Vector3(m, {4, 5, 6}));
    const auto cyc = prng_cycle_length(c);
    EXPECT_TRUE(cyc.found);
    EXPECT_EQ(cyc.period, 1u);

    auto c3 = c;
    c3.pattern = {0, 0, 0};
    EXPECT_EQ(prng_cycle_length(c3).period, 3u);

    const auto u = uniformity_stats(c, 1000);
    EXPECT_EQ(u.counts[0][4], 1000u);
    EXPECT_EQ(u.counts[1][5], 1000u);
    EXPECT_NEAR(u.max_relative_deviation, 22.0, 1e-9);  // one value holds p times its share
}

TEST(Prng, ScalarSeedStream) {
    const auto m = mod(7);
    const auto c = make_config(7, {1, 2, 3, 4, 5}, {Vector3(m, {1, 0, 0})}, {0}, Vector3(m, {1, 0, 0}));
    auto s = prng_init(c);
    const std::uint32_t expect[] = {3, 0, 1, 3, 0, 1};
    for (auto e : expect) ASSERT_EQ(prng_step(s, c).value(0), e);
}

TEST(Prng, CycleMatchesOracleSmallField) {
    const auto m = mod(5);
    for (std::uint64_t i = 0; i < 125; ++i) {
        const auto c = make_config(5, {1, 1, 1, 1, 2}, {Vector3(m, {0, 1, 0}), Vector3(m, {0, 0, 1})}, {0, 1},
                                   Vector3::from_index(m, i));
        const auto got = prng_cycle_length(c);
        const auto [tail, period] = oracle_cycle(c);
        ASSERT_TRUE(got.found);
        ASSERT_EQ(got.tail, tail) << i;
        ASSERT_EQ(got.period, period) << i;
    }
}

TEST(Prng, CycleMatchesOracleRandom) {
    Rng rng(61);
    for (int t = 0; t < 200; ++t) {
        const std::uint64_t p = t % 2 ? 7 : 11;
        const auto m = mod(p);
        std::vector<Vector3> seeds;
        for (int s = 0; s < 1 + t % 3; ++s) seeds.push_back(random_vector<3>(rng, m));
        std::vector<std::size_t> pattern;
        for (int s = 0; s < 1 + t % 5; ++s) pattern.push_back(uniform_below(rng, seeds.size()));
        PrngConfig c{random_params<3>(rng, m), seeds, pattern, random_vector<3>(rng, m),
                     t % 4 == 0 ? MultiplySide::left : MultiplySide::right};
        const auto got = prng_cycle_length(c);
        const auto [tail, period] = oracle_cycle(c);
        ASSERT_EQ(got.tail, tail);
        ASSERT_EQ(got.period, period);
        ASSERT_LE(got.period, prng_state_space(c));

        // Replaying tail + period steps lands on the state at index tail.
        auto s = prng_init(c);
        for (std::uint64_t i = 0; i < got.tail; ++i) prng_step(s, c);
        const auto at_tail = s;
        for (std::uint64_t i = 0; i < got.period; ++i) prng_step(s, c);
        ASSERT_EQ(s, at_tail);
    }
}

TEST(Prng, CapExhaustionIsReported) {
    const auto m = mod(37);
    const auto c = make_config(37, {1, 2, 3, 4, 5}, {Vector3(m, {0, 1, 5}), Vector3(m, {0, 2, 7})}, {0, 1},
                               Vector3(m, {1, 2, 3}));
    const auto full = prng_cycle_length(c);
    ASSERT_TRUE(full.found);
    const auto capped = prng_cycle_length(c, (full.tail + full.period) / 2);
    EXPECT_FALSE(capped.found);
}

TEST(Prng, Deterministic) {
    const auto m = mod(37);
    const auto c = make_config(37, {1, 2, 3, 4, 5}, {Vector3(m, {0, 1, 5}), Vector3(m, {3, 2, 7})}, {0, 1, 1},
                               Vector3(m, {1, 2, 3}));
    auto s1 = prng_init(c), s2 = prng_init(c);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(prng_step(s1, c), prng_step(s2, c));
    auto b1 = prng_init(c), b2 = prng_init(c);
    EXPECT_EQ(prng_bytes(b1, c, 4096), prng_bytes(b2, c, 4096));
}

TEST(Prng, BytesUseLowBitsOfAcceptedValues) {
    // p = 37: k = 5 bits per accepted value (values < 32).
    const auto m = mod(37);
    const auto c = make_config(37, {1, 2, 3, 4, 5}, {Vector3(m, {0, 1, 5}), Vector3(m, {3, 2, 7})}, {0, 1},
                               Vector3(m, {1, 2, 3}));
    auto s = prng_init(c);
    std::vector<std::uint32_t> accepted;
    while (accepted.size() < 16) {
        const auto v = prng_step(s, c);
        for (int i = 0; i < 3; ++i)
            if (v.value(i) < 32) accepted.push_back(v.value(i));
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits = (bits << 5) | accepted[i];  // 40 bits = 5 bytes
    auto s2 = prng_init(c);
    const auto bytes = prng_bytes(s2, c, 5);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(bytes[i], static_cast<std::uint8_t>(bits >> (32 - 8 * i))) << i;
}

TEST(Prng, UniformityCountsConserve) {
    const auto m = mod(37);
    const auto c = make_config(37, {1, 2, 3, 4, 5}, {Vector3(m, {0, 1, 5}), Vector3(m, {3, 2, 7})}, {0, 1},
                               Vector3(m, {1, 2, 3}));
    const auto u = uniformity_stats(c, 10000);
    for (const auto& comp : u.counts) {
        std::uint64_t sum = 0;
        for (auto x : comp) sum += x;
        EXPECT_EQ(sum, 10000u);
        EXPECT_EQ(comp.size(), 37u);
    }
}

TEST(Prng, SeedSearch) {
    const auto m = mod(37);
    const Params3 k(m, {1, 2, 3, 4, 5});
    EXPECT_TRUE(seed_search(k, {0, 1}, {0, 1, 10, 1, 0}).empty());

    SeedSearchOptions opts{60, 5, 8, 1, 0};
    const auto board = seed_search(k, {0, 1}, opts);
    ASSERT_EQ(board.size(), 8u);
    for (std::size_t i = 1; i < board.size(); ++i) EXPECT_GE(board[i - 1].cycle.period, board[i].cycle.period);
    for (const auto& e : board) {
        EXPECT_EQ(prng_cycle_length(e.config).period, e.cycle.period);
        EXPECT_LE(e.cycle.period, 2u * 37 * 37 * 37);
    }
    opts.threads = 3;
    const auto again = seed_search(k, {0, 1}, opts);
    ASSERT_EQ(again.size(), board.size());
    for (std::size_t i = 0; i < board.size(); ++i) {
        EXPECT_EQ(prng_config_to_json(again[i].config), prng_config_to_json(board[i].config));
    }
}

TEST(Prng, SingleOrbitStream) {
    const auto m = mod(23);
    const Params3 k(m, {6, 1, 1, 1, 2});
    const Vector3 a(m, {3, 4, 5});
    const auto stream = single_orbit_stream(a, k, 40);
    for (std::size_t i = 0; i < stream.size(); ++i) ASSERT_EQ(stream[i], pow_iter(a, i + 1, k));
    for (const auto& v : single_orbit_stream(identity<3>(m), k, 10)) EXPECT_TRUE(v.is_identity());
    EXPECT_TRUE(single_orbit_stream(a, k, 0).empty());
}
