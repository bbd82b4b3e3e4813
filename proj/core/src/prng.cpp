#include "mlmagma/prng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "json.hpp"
#include "mlmagma/cycle.hpp"
#include "mlmagma/parallel.hpp"
#include "mlmagma/power.hpp"
#include "mlmagma/random.hpp"

namespace mlm {
namespace {

using Raw = std::array<std::uint32_t, 3>;

Raw raw(const Vector3& v) {
    return {v.value(0), v.value(1), v.value(2)};
}

/// Composite state on raw residues for the hot cycle-detection loop.
struct FastState {
    Raw current;
    std::uint32_t pos;

    bool operator==(const FastState&) const = default;
};

bool seeds_less(const PrngConfig& x, const PrngConfig& y) {
    auto key = [](const PrngConfig& c) {
        std::vector<Raw> k;
        for (const auto& s : c.seeds) k.push_back(raw(s));
        k.push_back(raw(c.initial));
        return k;
    };
    return key(x) < key(y);
}

}  // namespace

void validate(const PrngConfig& config) {
    if (config.seeds.empty()) throw PrngError("prng config needs at least one seed");
    if (config.pattern.empty()) throw PrngError("prng config needs a non-empty pattern");
    for (std::size_t idx : config.pattern) {
        if (idx >= config.seeds.size()) {
            throw PrngError("pattern entry " + std::to_string(idx) + " out of range for " +
                            std::to_string(config.seeds.size()) + " seeds");
        }
    }
    const PrimeModulus& m = config.params.modulus;
    for (const auto& s : config.seeds) require_same_modulus(m, s.modulus(), "prng seed");
    require_same_modulus(m, config.initial.modulus(), "prng initial vector");
}

PrngState prng_init(const PrngConfig& config) {
    validate(config);
    return PrngState{config.initial, 0};
}

Vector3 prng_step(PrngState& state, const PrngConfig& config) {
    const Vector3& seed = config.seeds[config.pattern[state.pos]];
    state.current = config.side == MultiplySide::right ? mul3(state.current, seed, config.params)
                                                       : mul3(seed, state.current, config.params);
    state.pos = (state.pos + 1) % config.pattern.size();
    return state.current;
}

std::uint64_t prng_state_space(const PrngConfig& config) {
    const std::uint64_t p = config.p();
    return p * p * p * config.pattern.size();
}

PrngCycle prng_cycle_length(const PrngConfig& config, std::uint64_t cap) {
    validate(config);
    if (cap == 0) cap = 4 * prng_state_space(config) + 16;

    const Mul3Kernel kernel(config.params);
    std::vector<Raw> seq;
    seq.reserve(config.pattern.size());
    for (std::size_t idx : config.pattern) seq.push_back(raw(config.seeds[idx]));
    const auto len = static_cast<std::uint32_t>(seq.size());
    const bool right = config.side == MultiplySide::right;

    auto step = [&](const FastState& s) {
        const Raw& seed = seq[s.pos];
        return FastState{right ? kernel(s.current, seed) : kernel(seed, s.current), s.pos + 1 == len ? 0 : s.pos + 1};
    };
    const auto info = detect_cycle(FastState{raw(config.initial), 0}, step, cap);
    if (!info) return PrngCycle{};
    return PrngCycle{true, info->tail, info->period};
}

UniformityStats uniformity_stats(const PrngConfig& config, std::uint64_t samples) {
    PrngState state = prng_init(config);
    const std::uint32_t p = config.p();
    UniformityStats stats;
    stats.samples = samples;
    for (auto& c : stats.counts) c.assign(p, 0);
    for (std::uint64_t i = 0; i < samples; ++i) {
        const Vector3 out = prng_step(state, config);
        for (std::size_t k = 0; k < 3; ++k) ++stats.counts[k][out.value(k)];
    }
    if (samples == 0) return stats;
    const double expected = static_cast<double>(samples) / p;
    for (std::size_t k = 0; k < 3; ++k) {
        double chi = 0;
        for (std::uint64_t c : stats.counts[k]) {
            const double diff = static_cast<double>(c) - expected;
            chi += diff * diff / expected;
            stats.max_relative_deviation = std::max(stats.max_relative_deviation, std::abs(diff) / expected);
        }
        stats.chi_square[k] = chi;
    }
    return stats;
}

std::vector<SearchEntry> seed_search(const Params3& params, const std::vector<std::size_t>& pattern,
                                     const SeedSearchOptions& options) {
    if (pattern.empty()) throw PrngError("seed_search needs a non-empty pattern");
    const PrimeModulus& m = params.modulus;
    const std::size_t seed_count = *std::max_element(pattern.begin(), pattern.end()) + 1;

    std::vector<std::optional<SearchEntry>> results(options.trials);
    parallel_for(options.trials, options.threads, 1, [&](std::uint64_t begin, std::uint64_t end, unsigned) {
        for (std::uint64_t t = begin; t < end; ++t) {
            // Each trial owns an independent stream so the outcome does not
            // depend on scheduling.
            std::seed_seq seq{static_cast<std::uint32_t>(options.rng_seed), static_cast<std::uint32_t>(options.rng_seed >> 32),
                              static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
            Rng rng(seq);
            PrngConfig config{params, {}, pattern, Vector3(m), MultiplySide::right};
            const bool structured = (t % 2) == 1;
            for (std::size_t i = 0; i < seed_count; ++i) {
                if (structured) {
                    const std::uint64_t small = 1 + uniform_below(rng, std::min<std::uint32_t>(3, m.value() - 1));
                    config.seeds.push_back(Vector3(m, {0, small, uniform_below(rng, m.value())}));
                } else {
                    config.seeds.push_back(random_vector<3>(rng, m));
                }
            }
            config.initial = random_vector<3>(rng, m);
            const PrngCycle cycle = prng_cycle_length(config, options.cap);
            results[t].emplace(SearchEntry{std::move(config), cycle});
        }
    });

    std::vector<SearchEntry> board;
    board.reserve(results.size());
    for (auto& r : results) board.push_back(std::move(*r));
    std::sort(board.begin(), board.end(), [](const SearchEntry& x, const SearchEntry& y) {
        if (x.cycle.period != y.cycle.period) return x.cycle.period > y.cycle.period;
        return seeds_less(x.config, y.config);
    });
    if (board.size() > options.keep) board.erase(board.begin() + static_cast<std::ptrdiff_t>(options.keep), board.end());
    return board;
}

std::vector<Vector3> single_orbit_stream(const Vector3& a, const Params3& params, std::size_t count) {
    require_same_modulus(a.modulus(), params.modulus, "single_orbit_stream");
    std::vector<Vector3> out;
    out.reserve(count);
    if (count == 0) return out;
    out.push_back(a);
    while (out.size() < count) out.push_back(mul3(out.back(), a, params));
    return out;
}

std::vector<std::uint8_t> prng_bytes(PrngState& state, const PrngConfig& config, std::size_t count) {
    const unsigned k = static_cast<unsigned>(std::bit_width(config.p())) - 1;
    const std::uint32_t limit = std::uint32_t{1} << k;
    std::vector<std::uint8_t> out;
    out.reserve(count);
    std::uint64_t buffer = 0;
    unsigned bits = 0;
    while (out.size() < count) {
        const Vector3 v = prng_step(state, config);
        for (std::size_t i = 0; i < 3 && out.size() < count; ++i) {
            if (v.value(i) >= limit) continue;
            buffer = (buffer << k) | v.value(i);
            bits += k;
            while (bits >= 8 && out.size() < count) {
                bits -= 8;
                out.push_back(static_cast<std::uint8_t>(buffer >> bits));
            }
            buffer &= (std::uint64_t{1} << bits) - 1;
        }
    }
    return out;
}

std::string prng_config_to_json(const PrngConfig& config) {
    auto vec = [](const Vector3& v) { return std::vector<std::uint32_t>{v.value(0), v.value(1), v.value(2)}; };
    nlohmann::ordered_json j;
    j["p"] = config.p();
    std::vector<std::uint32_t> coeffs;
    for (const auto& c : config.params.coeffs) coeffs.push_back(c.value);
    j["params"] = coeffs;
    j["seeds"] = nlohmann::ordered_json::array();
    for (const auto& s : config.seeds) j["seeds"].push_back(vec(s));
    j["pattern"] = config.pattern;
    j["initial"] = vec(config.initial);
    if (config.side == MultiplySide::left) j["side"] = "left";
    return j.dump();
}

PrngConfig prng_config_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw PrngError(std::string("prng config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw PrngError("prng config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        static const std::array<std::string_view, 6> kKeys = {"p", "params", "seeds", "pattern", "initial", "side"};
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
            throw PrngError("prng config: unknown key '" + key + "'");
        }
    }
    try {
        const PrimeModulus m = PrimeModulus::make(j.at("p").get<std::uint64_t>());
        auto vec = [&](const nlohmann::json& a) {
            const auto xs = a.get<std::vector<std::uint64_t>>();
            if (xs.size() != 3) throw PrngError("prng config: vectors need 3 components");
            return Vector3(m, {m.checked(xs[0]), m.checked(xs[1]), m.checked(xs[2])});
        };
        const auto coeffs = j.at("params").get<std::vector<std::uint64_t>>();
        if (coeffs.size() != 5) throw PrngError("prng config: params needs 5 coefficients");
        Params3 params(m);
        for (std::size_t i = 0; i < 5; ++i) params.coeffs[i] = m.checked(coeffs[i]);

        PrngConfig config{params, {}, j.at("pattern").get<std::vector<std::size_t>>(), vec(j.at("initial")),
                          MultiplySide::right};
        for (const auto& s : j.at("seeds")) config.seeds.push_back(vec(s));
        if (j.contains("side")) {
            const auto side = j["side"].get<std::string>();
            if (side == "left") {
                config.side = MultiplySide::left;
            } else if (side != "right") {
                throw PrngError("prng config: side must be 'left' or 'right'");
            }
        }
        validate(config);
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw PrngError(std::string("prng config: ") + e.what());
    }
}

}  // namespace mlm
