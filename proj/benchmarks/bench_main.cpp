#include <benchmark/benchmark.h>

#include "mlmagma/dip.hpp"
#include "mlmagma/orbit.hpp"
#include "mlmagma/power.hpp"
#include "mlmagma/prng.hpp"
#include "mlmagma/random.hpp"
#include "mlmagma/symbolic.hpp"

using namespace mlm;

namespace {

const PrimeModulus kBig = PrimeModulus::make(2147483647);

void BM_Mul3(benchmark::State& state) {
    Rng rng(1);
    const auto k = random_params<3>(rng, kBig);
    auto x = random_vector<3>(rng, kBig);
    const auto a = random_vector<3>(rng, kBig);
    for (auto _ : state) {
        x = mul3(x, a, k);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_Mul3);

void BM_Mul4(benchmark::State& state) {
    Rng rng(2);
    const auto k = random_params<4>(rng, kBig);
    auto x = random_vector<4>(rng, kBig);
    const auto a = random_vector<4>(rng, kBig);
    for (auto _ : state) {
        x = mul4(x, a, k);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_Mul4);

void BM_PowFast(benchmark::State& state) {
    Rng rng(3);
    const auto k = random_params<3>(rng, kBig);
    const auto a = random_vector<3>(rng, kBig);
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pow_fast(a, n, k));
}
BENCHMARK(BM_PowFast)->Arg(1 << 10)->Arg(1 << 20)->Arg(1LL << 40);

void BM_PowIter(benchmark::State& state) {
    Rng rng(4);
    const auto k = random_params<3>(rng, kBig);
    const auto a = random_vector<3>(rng, kBig);
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pow_iter(a, n, k));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PowIter)->RangeMultiplier(4)->Range(1 << 8, 1 << 16)->Complexity(benchmark::oN);

void BM_OrbitLength(benchmark::State& state) {
    const auto m = PrimeModulus::make(61);
    const Params3 k(m, {31, 30, 1, 1, 2});
    const Vector3 a(m, {0, 1, 4});  // period 3720
    for (auto _ : state) benchmark::DoNotOptimize(orbit_length(a, k));
}
BENCHMARK(BM_OrbitLength);

void BM_ScanSpace(benchmark::State& state) {
    const auto m = PrimeModulus::make(static_cast<std::uint64_t>(state.range(0)));
    const Params3 k(m, {6, 1, 1, 1, 2});
    for (auto _ : state) benchmark::DoNotOptimize(scan_space(k, {1, 127}));
}
BENCHMARK(BM_ScanSpace)->Arg(11)->Arg(23)->Unit(benchmark::kMillisecond);

void BM_PrngStep(benchmark::State& state) {
    const auto m = PrimeModulus::make(37);
    PrngConfig c{Params3(m, {9, 19, 1, 1, 2}), {Vector3(m, {0, 1, 5}), Vector3(m, {0, 2, 7})}, {0, 1},
                 Vector3(m, {1, 2, 3})};
    auto s = prng_init(c);
    for (auto _ : state) benchmark::DoNotOptimize(prng_step(s, c));
}
BENCHMARK(BM_PrngStep);

void BM_PrngCycle(benchmark::State& state) {
    const auto m = PrimeModulus::make(37);
    PrngConfig c{Params3(m, {9, 19, 1, 1, 2}), {Vector3(m, {0, 1, 5}), Vector3(m, {0, 2, 7})}, {0, 1},
                 Vector3(m, {1, 2, 3})};
    for (auto _ : state) benchmark::DoNotOptimize(prng_cycle_length(c));
}
BENCHMARK(BM_PrngCycle)->Unit(benchmark::kMillisecond);

void BM_SymPow(benchmark::State& state) {
    const auto n = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sym::sym_pow(n));
}
BENCHMARK(BM_SymPow)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_DipBruteforce(benchmark::State& state) {
    Rng rng(5);
    const auto k = random_params<3>(rng, kBig);
    const auto a = random_vector<3>(rng, kBig);
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const DipInstance<3> inst{a, pow_fast(a, n, k), k, n};
    for (auto _ : state) benchmark::DoNotOptimize(dip_bruteforce(inst));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DipBruteforce)->RangeMultiplier(2)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
