#include "mlmagma/dip.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "mlmagma/power.hpp"
#include "mlmagma/random.hpp"

namespace mlm {

template <std::size_t N>
DipResult dip_bruteforce(const DipInstance<N>& instance) {
    require_same_modulus(instance.base.modulus(), instance.target.modulus(), "dip_bruteforce");
    require_same_modulus(instance.base.modulus(), instance.params.modulus, "dip_bruteforce");
    DipResult result;
    if (instance.cap == 0) return result;
    Vec<N> power = instance.base;
    for (std::uint64_t n = 1;; ++n) {
        ++result.steps;
        if (power == instance.target) {
            result.exponent = n;
            return result;
        }
        if (n == instance.cap) return result;
        power = mul(power, instance.base, instance.params);
    }
}

template DipResult dip_bruteforce<3>(const DipInstance<3>&);
template DipResult dip_bruteforce<4>(const DipInstance<4>&);

std::vector<DipTimingRow> dip_timing(const Params3& params, std::uint64_t samples,
                                     const std::vector<std::uint64_t>& exponents, std::uint64_t rng_seed) {
    const PrimeModulus& m = params.modulus;
    Rng rng(rng_seed);
    std::vector<DipTimingRow> rows;
    for (std::uint64_t n : exponents) {
        DipTimingRow row;
        row.exponent = n;
        row.samples = samples;
        row.min_steps = UINT64_MAX;
        double total_steps = 0;
        double total_seconds = 0;
        for (std::uint64_t s = 0; s < samples; ++s) {
            Vector3 base(m);
            do {
                base = random_vector<3>(rng, m);
            } while (base.is_identity());
            const DipInstance<3> inst{base, pow_fast(base, n, params), params, n};
            const auto t0 = std::chrono::steady_clock::now();
            const DipResult r = dip_bruteforce(inst);
            total_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            total_steps += static_cast<double>(r.steps);
            row.min_steps = std::min(row.min_steps, r.steps);
            row.max_steps = std::max(row.max_steps, r.steps);
        }
        if (samples == 0) row.min_steps = 0;
        row.mean_steps = samples ? total_steps / static_cast<double>(samples) : 0.0;
        row.mean_seconds = samples ? total_seconds / static_cast<double>(samples) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

void write_dip_timing_csv(std::ostream& os, const std::vector<DipTimingRow>& rows, bool with_time) {
    os << "exponent,samples,mean_steps,min_steps,max_steps" << (with_time ? ",mean_seconds" : "") << '\n';
    for (const auto& r : rows) {
        os << r.exponent << ',' << r.samples << ',' << r.mean_steps << ',' << r.min_steps << ',' << r.max_steps;
        if (with_time) os << ',' << r.mean_seconds;
        os << '\n';
    }
}

}  // namespace mlm
