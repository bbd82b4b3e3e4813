#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mlmagma/magma.hpp"

namespace mlm {

class OrbitError : public Error {
public:
    using Error::Error;
};

/// Power sequence a, a^2, a^3, ... of one start vector (successor y -> y * a).
struct OrbitRecord {
    Vector3 start;
    std::uint64_t tail = 0;    // a^(tail+1) is the first state on the cycle
    std::uint64_t period = 0;  // cycle length
    Vector3 cycle_rep;         // lexicographically smallest vector on the cycle
};

OrbitRecord orbit_length(const Vector3& a, const Params3& params);

/// How a census weights orbits when forming proportions.
enum class OrbitMeasure {
    element,  // one count per start vector (p^3 in total)
    cycle,    // one count per distinct cycle, cycles compared as state sets
    scan,     // lexicographic scan over starts; a start already visited by an
              // earlier recorded orbit is skipped, otherwise its orbit is
              // recorded once with its full length and all its states marked
};

const char* to_string(OrbitMeasure m);
inline constexpr std::array<OrbitMeasure, 3> kAllMeasures = {OrbitMeasure::element, OrbitMeasure::cycle,
                                                             OrbitMeasure::scan};

/// The four lengths singled out by the analysis: p-1, p^2-1, (p-1)/2, (p^2-1)/2.
struct SpecialLength {
    const char* name;
    std::uint64_t length;
};
std::array<SpecialLength, 4> special_lengths(std::uint32_t p);

struct CensusReport {
    Params3 params;

    std::map<std::uint64_t, std::uint64_t> start_histogram;  // period -> starts
    std::map<std::uint64_t, std::uint64_t> cycle_histogram;  // period -> distinct cycles
    std::map<std::uint64_t, std::uint64_t> scan_histogram;   // period -> scan-recorded orbits
    std::map<std::uint64_t, std::uint64_t> tail_histogram;   // tail length -> starts

    std::uint64_t total_starts = 0;
    std::uint64_t distinct_cycles = 0;
    std::uint64_t scan_orbits = 0;
    std::uint64_t states_on_cycles = 0;   // size of the union of all cycles
    std::uint64_t cycle_state_total = 0;  // sum of periods over distinct cycles

    explicit CensusReport(const Params3& p) : params(p) {}

    std::uint32_t p() const { return params.modulus.value(); }
    const std::map<std::uint64_t, std::uint64_t>& histogram(OrbitMeasure m) const;
    std::uint64_t count(OrbitMeasure m, std::uint64_t period) const;
    std::uint64_t total(OrbitMeasure m) const;
    double proportion(OrbitMeasure m, std::uint64_t period) const;
};

struct ScanOptions {
    unsigned threads = 0;           // 0 = hardware concurrency
    std::uint32_t max_p = 127;      // refuse full scans above this modulus
};

/// Full census over all p^3 start vectors. Throws OrbitError when p exceeds
/// options.max_p.
CensusReport scan_space(const Params3& params, const ScanOptions& options = {});

struct ValueRange {
    std::uint32_t lo = 0;
    std::uint32_t hi = 0;  // inclusive
};

struct MeasureStats {
    double min = 0, mean = 0, max = 0;
};

/// Min/mean/max of proportions over a set of reports, indexed
/// [measure][special length].
struct SweepAggregate {
    std::string label;
    std::size_t reports = 0;
    std::array<std::array<MeasureStats, 4>, 3> stats{};

    const MeasureStats& at(OrbitMeasure m, std::size_t special_index) const {
        return stats[static_cast<std::size_t>(m)][special_index];
    }
};

struct SweepResult {
    std::vector<CensusReport> reports;  // ordered by (A, B)
    SweepAggregate all;
    SweepAggregate nonzero_distinct;    // A != 0, B != 0, A != B
};

/// One census per (A, B) in the given ranges with C, D, E fixed.
SweepResult param_sweep(std::uint32_t p, ValueRange a_range, ValueRange b_range, std::uint32_t c, std::uint32_t d,
                        std::uint32_t e, const ScanOptions& options = {});

SweepAggregate aggregate(const std::vector<const CensusReport*>& reports, std::string label);

struct HeuristicResult {
    std::vector<OrbitRecord> maximal;  // period == p^2 - 1
    std::uint64_t trials = 0;
};

/// Tries starts (0, s, x) for s in `seconds`, x = 0..p-1, in that order,
/// until `budget` starts have been examined.
HeuristicResult heuristic_search(const Params3& params, std::uint64_t budget,
                                 const std::vector<std::uint32_t>& seconds = {1, 2});

/// CSV: one row per period with its element/cycle/scan counts and flags
/// for the special lengths.
void write_census_csv(std::ostream& os, const CensusReport& report, bool header = true);
std::string census_json(const CensusReport& report);
std::string sweep_json(const SweepResult& sweep);

}  // namespace mlm
