#include "mlmagma/orbit.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "json.hpp"
#include "mlmagma/cycle.hpp"
#include "mlmagma/parallel.hpp"

namespace mlm {
namespace {

using State = std::array<std::uint32_t, 3>;

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-independent fingerprint of a cycle's state set.
struct CycleKey {
    std::uint64_t period = 0;
    std::uint64_t sum1 = 0;
    std::uint64_t sum2 = 0;

    bool operator==(const CycleKey&) const = default;
};

struct CycleKeyHash {
    std::size_t operator()(const CycleKey& k) const { return k.sum1 ^ (k.sum2 * 31) ^ k.period; }
};

struct Partial {
    std::map<std::uint64_t, std::uint64_t> start_histogram;
    std::map<std::uint64_t, std::uint64_t> tail_histogram;
    std::unordered_map<CycleKey, char, CycleKeyHash> cycles;
};

std::uint64_t pack(const State& s, std::uint64_t p) {
    return (std::uint64_t{s[0]} * p + s[1]) * p + s[2];
}

State unpack(std::uint64_t idx, std::uint64_t p) {
    const auto c2 = static_cast<std::uint32_t>(idx % p);
    idx /= p;
    const auto c1 = static_cast<std::uint32_t>(idx % p);
    return {static_cast<std::uint32_t>(idx / p), c1, c2};
}

CycleInfo cycle_of(const State& a, const Mul3Kernel& kernel) {
    auto step = [&](const State& y) { return kernel(y, a); };
    // The sequence lives in a finite space, so detection always terminates.
    return *detect_cycle(a, step, UINT64_MAX);
}

State advance(State y, const State& a, std::uint64_t steps, const Mul3Kernel& kernel) {
    for (std::uint64_t i = 0; i < steps; ++i) y = kernel(y, a);
    return y;
}

}  // namespace

const char* to_string(OrbitMeasure m) {
    switch (m) {
        case OrbitMeasure::element: return "element";
        case OrbitMeasure::cycle: return "cycle";
        case OrbitMeasure::scan: return "scan";
    }
    return "?";
}

std::array<SpecialLength, 4> special_lengths(std::uint32_t p) {
    const std::uint64_t n = p;
    return {{{"N-1", n - 1}, {"N^2-1", n * n - 1}, {"(N-1)/2", (n - 1) / 2}, {"(N^2-1)/2", (n * n - 1) / 2}}};
}

OrbitRecord orbit_length(const Vector3& a, const Params3& params) {
    require_same_modulus(a.modulus(), params.modulus, "orbit_length");
    const Mul3Kernel kernel(params);
    const State s{a.value(0), a.value(1), a.value(2)};
    const CycleInfo info = cycle_of(s, kernel);

    State y = advance(s, s, info.tail, kernel);
    State rep = y;
    for (std::uint64_t i = 1; i < info.period; ++i) {
        y = kernel(y, s);
        rep = std::min(rep, y);
    }
    const PrimeModulus& m = a.modulus();
    return OrbitRecord{a, info.tail, info.period, Vector3(m, {Residue{rep[0]}, Residue{rep[1]}, Residue{rep[2]}})};
}

const std::map<std::uint64_t, std::uint64_t>& CensusReport::histogram(OrbitMeasure m) const {
    switch (m) {
        case OrbitMeasure::element: return start_histogram;
        case OrbitMeasure::cycle: return cycle_histogram;
        case OrbitMeasure::scan: return scan_histogram;
    }
    return start_histogram;
}

std::uint64_t CensusReport::count(OrbitMeasure m, std::uint64_t period) const {
    const auto& h = histogram(m);
    auto it = h.find(period);
    return it == h.end() ? 0 : it->second;
}

std::uint64_t CensusReport::total(OrbitMeasure m) const {
    switch (m) {
        case OrbitMeasure::element: return total_starts;
        case OrbitMeasure::cycle: return distinct_cycles;
        case OrbitMeasure::scan: return scan_orbits;
    }
    return 0;
}

double CensusReport::proportion(OrbitMeasure m, std::uint64_t period) const {
    const std::uint64_t t = total(m);
    return t == 0 ? 0.0 : static_cast<double>(count(m, period)) / static_cast<double>(t);
}

CensusReport scan_space(const Params3& params, const ScanOptions& options) {
    const std::uint64_t p = params.modulus.value();
    if (p > options.max_p) {
        throw OrbitError("full scan of p = " + std::to_string(p) + " needs " + std::to_string(p * p * p) +
                         " orbit walks; raise the budget (max_p) to at least " + std::to_string(p));
    }
    const std::uint64_t space = p * p * p;
    if (space >= (std::uint64_t{1} << 32)) throw OrbitError("state space too large for a full scan");

    const Mul3Kernel kernel(params);
    std::vector<std::uint32_t> periods(space), tails(space);
    std::unique_ptr<std::atomic<std::uint8_t>[]> on_cycle(new std::atomic<std::uint8_t>[space]);
    for (std::uint64_t i = 0; i < space; ++i) on_cycle[i].store(0, std::memory_order_relaxed);

    const unsigned threads = resolve_threads(options.threads);
    std::vector<Partial> partials(threads);

    parallel_for(space, threads, 256, [&](std::uint64_t begin, std::uint64_t end, unsigned worker) {
        Partial& part = partials[worker];
        for (std::uint64_t idx = begin; idx < end; ++idx) {
            const State a = unpack(idx, p);
            const CycleInfo info = cycle_of(a, kernel);
            periods[idx] = static_cast<std::uint32_t>(info.period);
            tails[idx] = static_cast<std::uint32_t>(info.tail);
            ++part.start_histogram[info.period];
            ++part.tail_histogram[info.tail];

            CycleKey key{info.period, 0, 0};
            State y = advance(a, a, info.tail, kernel);
            for (std::uint64_t i = 0; i < info.period; ++i) {
                const std::uint64_t id = pack(y, p);
                key.sum1 += mix64(id);
                key.sum2 += mix64(id ^ 0x5bd1e9955bd1e995ULL);
                on_cycle[id].store(1, std::memory_order_relaxed);
                y = kernel(y, a);
            }
            part.cycles.emplace(key, 0);
        }
    });

    CensusReport report(params);
    report.total_starts = space;
    std::unordered_map<CycleKey, char, CycleKeyHash> cycles;
    for (auto& part : partials) {
        for (const auto& [k, v] : part.start_histogram) report.start_histogram[k] += v;
        for (const auto& [k, v] : part.tail_histogram) report.tail_histogram[k] += v;
        cycles.merge(part.cycles);
    }
    for (const auto& [key, unused] : cycles) {
        ++report.cycle_histogram[key.period];
        report.cycle_state_total += key.period;
    }
    report.distinct_cycles = cycles.size();
    for (std::uint64_t i = 0; i < space; ++i) report.states_on_cycles += on_cycle[i].load(std::memory_order_relaxed);

    // The scan measure depends on visiting starts in lexicographic order,
    // so it runs sequentially over the per-start results.
    std::vector<std::uint8_t> visited(space, 0);
    for (std::uint64_t idx = 0; idx < space; ++idx) {
        if (visited[idx]) continue;
        ++report.scan_histogram[periods[idx]];
        ++report.scan_orbits;
        const State a = unpack(idx, p);
        State y = a;
        const std::uint64_t path = std::uint64_t{tails[idx]} + periods[idx];
        for (std::uint64_t i = 0; i < path; ++i) {
            visited[pack(y, p)] = 1;
            y = kernel(y, a);
        }
    }
    return report;
}

SweepAggregate aggregate(const std::vector<const CensusReport*>& reports, std::string label) {
    SweepAggregate agg;
    agg.label = std::move(label);
    agg.reports = reports.size();
    if (reports.empty()) return agg;
    const auto specials = special_lengths(reports.front()->p());
    for (std::size_t mi = 0; mi < kAllMeasures.size(); ++mi) {
        for (std::size_t si = 0; si < specials.size(); ++si) {
            MeasureStats s{1.0, 0.0, 0.0};
            for (const CensusReport* r : reports) {
                const double v = r->proportion(kAllMeasures[mi], specials[si].length);
                s.min = std::min(s.min, v);
                s.max = std::max(s.max, v);
                s.mean += v;
            }
            s.mean /= static_cast<double>(reports.size());
            agg.stats[mi][si] = s;
        }
    }
    return agg;
}

SweepResult param_sweep(std::uint32_t p, ValueRange a_range, ValueRange b_range, std::uint32_t c, std::uint32_t d,
                        std::uint32_t e, const ScanOptions& options) {
    const PrimeModulus m = PrimeModulus::make(p);
    if (a_range.lo > a_range.hi || b_range.lo > b_range.hi || a_range.hi >= p || b_range.hi >= p) {
        throw OrbitError("sweep ranges must satisfy lo <= hi < p");
    }
    if (p > options.max_p) {
        throw OrbitError("sweep at p = " + std::to_string(p) + " exceeds the full-scan budget (max_p = " +
                         std::to_string(options.max_p) + ")");
    }
    const std::uint64_t a_count = a_range.hi - a_range.lo + 1;
    const std::uint64_t b_count = b_range.hi - b_range.lo + 1;
    const std::uint64_t combos = a_count * b_count;

    std::vector<std::optional<CensusReport>> slots(combos);
    ScanOptions inner = options;
    inner.threads = 1;
    parallel_for(combos, options.threads, 1, [&](std::uint64_t begin, std::uint64_t end, unsigned) {
        for (std::uint64_t i = begin; i < end; ++i) {
            const std::uint32_t A = a_range.lo + static_cast<std::uint32_t>(i / b_count);
            const std::uint32_t B = b_range.lo + static_cast<std::uint32_t>(i % b_count);
            slots[i].emplace(scan_space(Params3(m, {A, B, c, d, e}), inner));
        }
    });

    SweepResult result;
    result.reports.reserve(combos);
    for (auto& s : slots) result.reports.push_back(std::move(*s));

    std::vector<const CensusReport*> all, subset;
    for (const auto& r : result.reports) {
        all.push_back(&r);
        const auto A = r.params[0].value, B = r.params[1].value;
        if (A != 0 && B != 0 && A != B) subset.push_back(&r);
    }
    result.all = aggregate(all, "all");
    result.nonzero_distinct = aggregate(subset, "nonzero_distinct");
    return result;
}

HeuristicResult heuristic_search(const Params3& params, std::uint64_t budget,
                                 const std::vector<std::uint32_t>& seconds) {
    const PrimeModulus& m = params.modulus;
    const std::uint64_t target = std::uint64_t{m.value()} * m.value() - 1;
    HeuristicResult result;
    for (std::uint32_t s : seconds) {
        for (std::uint32_t x = 0; x < m.value(); ++x) {
            if (result.trials >= budget) return result;
            ++result.trials;
            const Vector3 start(m, {0, s, x});
            if (start.is_identity()) continue;
            OrbitRecord rec = orbit_length(start, params);
            if (rec.period == target) result.maximal.push_back(std::move(rec));
        }
    }
    return result;
}

void write_census_csv(std::ostream& os, const CensusReport& report, bool header) {
    const auto specials = special_lengths(report.p());
    if (header) {
        os << "p,A,B,C,D,E,period,element_count,cycle_count,scan_count,is_n_minus_1,is_n2_minus_1,"
              "is_half_n_minus_1,is_half_n2_minus_1\n";
    }
    std::map<std::uint64_t, char> periods;
    for (const auto& [k, v] : report.start_histogram) periods[k];
    for (const auto& [k, v] : report.cycle_histogram) periods[k];
    for (const auto& [k, v] : report.scan_histogram) periods[k];
    for (const auto& [period, unused] : periods) {
        os << report.p();
        for (const auto& c : report.params.coeffs) os << ',' << c.value;
        os << ',' << period << ',' << report.count(OrbitMeasure::element, period) << ','
           << report.count(OrbitMeasure::cycle, period) << ',' << report.count(OrbitMeasure::scan, period);
        for (const auto& s : specials) os << ',' << (period == s.length ? 1 : 0);
        os << '\n';
    }
}

namespace {

nlohmann::ordered_json report_to_json(const CensusReport& r) {
    nlohmann::ordered_json j;
    j["p"] = r.p();
    std::vector<std::uint32_t> coeffs;
    for (const auto& c : r.params.coeffs) coeffs.push_back(c.value);
    j["params"] = coeffs;
    j["total_starts"] = r.total_starts;
    j["distinct_cycles"] = r.distinct_cycles;
    j["scan_orbits"] = r.scan_orbits;
    j["states_on_cycles"] = r.states_on_cycles;
    j["cycle_state_total"] = r.cycle_state_total;
    auto& special = j["special_lengths"];
    for (const auto& s : special_lengths(r.p())) {
        nlohmann::ordered_json e;
        e["name"] = s.name;
        e["length"] = s.length;
        for (OrbitMeasure m : kAllMeasures) {
            e[std::string(to_string(m)) + "_count"] = r.count(m, s.length);
            e[std::string(to_string(m)) + "_proportion"] = r.proportion(m, s.length);
        }
        special.push_back(e);
    }
    auto hist = [](const std::map<std::uint64_t, std::uint64_t>& h) {
        nlohmann::ordered_json out = nlohmann::ordered_json::object();
        for (const auto& [k, v] : h) out[std::to_string(k)] = v;
        return out;
    };
    j["start_histogram"] = hist(r.start_histogram);
    j["cycle_histogram"] = hist(r.cycle_histogram);
    j["scan_histogram"] = hist(r.scan_histogram);
    j["tail_histogram"] = hist(r.tail_histogram);
    return j;
}

nlohmann::ordered_json aggregate_to_json(const SweepAggregate& agg, std::uint32_t p) {
    nlohmann::ordered_json j;
    j["label"] = agg.label;
    j["reports"] = agg.reports;
    const auto specials = special_lengths(p);
    for (std::size_t mi = 0; mi < kAllMeasures.size(); ++mi) {
        auto& mj = j["measures"][to_string(kAllMeasures[mi])];
        for (std::size_t si = 0; si < specials.size(); ++si) {
            const auto& s = agg.stats[mi][si];
            mj[specials[si].name] = {{"min", s.min}, {"mean", s.mean}, {"max", s.max}};
        }
    }
    return j;
}

}  // namespace

std::string census_json(const CensusReport& report) {
    return report_to_json(report).dump(2);
}

std::string sweep_json(const SweepResult& sweep) {
    nlohmann::ordered_json j;
    const std::uint32_t p = sweep.reports.empty() ? 0 : sweep.reports.front().p();
    j["p"] = p;
    j["combinations"] = sweep.reports.size();
    j["aggregates"] = {aggregate_to_json(sweep.all, p), aggregate_to_json(sweep.nonzero_distinct, p)};
    auto& rows = j["reports"];
    rows = nlohmann::ordered_json::array();
    for (const auto& r : sweep.reports) {
        nlohmann::ordered_json row;
        row["A"] = r.params[0].value;
        row["B"] = r.params[1].value;
        for (OrbitMeasure m : kAllMeasures) {
            for (const auto& s : special_lengths(p)) {
                row[std::string(to_string(m)) + ":" + s.name] = r.proportion(m, s.length);
            }
        }
        rows.push_back(row);
    }
    return j.dump(2);
}

}  // namespace mlm
