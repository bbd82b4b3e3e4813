#include "mlmagma/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlmagma/dip.hpp"
#include "mlmagma/kx.hpp"
#include "mlmagma/orbit.hpp"
#include "mlmagma/power.hpp"
#include "mlmagma/prng.hpp"
#include "mlmagma/symbolic.hpp"

namespace mlm::cli {
namespace {

using u64 = std::uint64_t;
using Json = nlohmann::json;

class UsageError : public Error {
public:
    using Error::Error;
};

// Everything any subcommand can take. Strings hold list-valued inputs and
// are parsed after CLI11 is done, so that config files and the command line
// share one code path.
struct Options {
    unsigned threads = 0;
    std::string config;

    u64 p = 0;
    std::string params, a, b, base, target, seeds, pattern, initial;
    u64 n = 1;
    bool check_iter = false;

    std::string property = "all";
    std::size_t max_n = 6;
    std::size_t grid = 8;

    unsigned sym_n = 3;
    int component = -1;
    std::string format;
    unsigned sym_max_n = 6;

    std::string out, json_out;
    u64 max_p = 127;
    std::string a_range, b_range;
    u64 c = 1, d = 1, e = 2;
    u64 budget = 0;
    std::string seconds = "1,2";

    std::string side = "right";
    u64 count = 16;
    u64 cap = 0;
    u64 samples = 0;
    u64 trials = 500;
    u64 seed = 1;
    bool seed_given = false;
    std::size_t keep = 10;
    std::string save;

    std::string exponents;
    bool with_time = false;

    unsigned bits = 64;
    bool additive = false;
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    u64 timeout_ms = 10000;
    unsigned sessions = 1;
};

// ---------------------------------------------------------------------------
// Value parsing

std::vector<u64> parse_list(const std::string& text, const char* what) {
    std::vector<u64> values;
    std::string token;
    std::istringstream is(text);
    while (std::getline(is, token, ',')) {
        const auto first = token.find_first_not_of(" \t");
        const auto last = token.find_last_not_of(" \t");
        if (first == std::string::npos) throw UsageError(std::string(what) + ": empty entry in '" + text + "'");
        token = token.substr(first, last - first + 1);
        std::size_t used = 0;
        u64 v = 0;
        try {
            v = std::stoull(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || token[0] == '-') {
            throw UsageError(std::string(what) + ": '" + token + "' is not a non-negative integer");
        }
        values.push_back(v);
    }
    return values;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream is(text);
    while (std::getline(is, part, sep)) parts.push_back(part);
    return parts;
}

PrimeModulus modulus_of(const Options& o) {
    if (o.p == 0) throw UsageError("--p is required");
    return PrimeModulus::make(o.p);
}

template <std::size_t N>
std::array<Residue, N> residues(const std::vector<u64>& v, const PrimeModulus& m, const char* what) {
    if (v.size() != N) {
        throw UsageError(std::string(what) + ": expected " + std::to_string(N) + " values, got " +
                         std::to_string(v.size()));
    }
    std::array<Residue, N> r{};
    for (std::size_t i = 0; i < N; ++i) {
        if (v[i] >= m.value()) {
            throw UsageError(std::string(what) + ": " + std::to_string(v[i]) + " is not in [0, " +
                             std::to_string(m.value()) + ")");
        }
        r[i] = Residue{static_cast<std::uint32_t>(v[i])};
    }
    return r;
}

template <std::size_t N>
Vec<N> vec_arg(const std::string& text, const PrimeModulus& m, const char* what) {
    if (text.empty()) throw UsageError(std::string("--") + what + " is required");
    return Vec<N>(m, residues<N>(parse_list(text, what), m, what));
}

template <std::size_t N>
MagmaParams<N> params_arg(const std::string& text, const PrimeModulus& m) {
    return MagmaParams<N>(m, residues<MagmaParams<N>::kCount>(parse_list(text, "params"), m, "params"));
}

/// Calls f(std::integral_constant<size_t, N>) with N picked from the number
/// of operation parameters (5 for K^3, 9 for K^4).
template <class F>
int with_dim(const Options& o, F&& f) {
    if (o.params.empty()) throw UsageError("--params is required");
    const auto count = parse_list(o.params, "params").size();
    if (count == 5) return f(std::integral_constant<std::size_t, 3>{});
    if (count == 9) return f(std::integral_constant<std::size_t, 4>{});
    throw UsageError("params: expected 5 (dimension 3) or 9 (dimension 4) values, got " + std::to_string(count));
}

Params3 params3(const Options& o) {
    if (o.params.empty()) throw UsageError("--params is required");
    return params_arg<3>(o.params, modulus_of(o));
}

ValueRange range_arg(const std::string& text, u64 p, const char* what) {
    if (text.empty()) return {0, static_cast<std::uint32_t>(p - 1)};
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw UsageError(std::string(what) + ": expected lo:hi");
    const u64 lo = parse_list(parts[0], what).at(0);
    const u64 hi = parse_list(parts[1], what).at(0);
    if (lo > hi || hi >= p) throw UsageError(std::string(what) + ": need lo <= hi < p");
    return {static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi)};
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    return f;
}

std::string percent(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << 100.0 * x << '%';
    return os.str();
}

// ---------------------------------------------------------------------------
// mul, pow, check

int run_mul(const Options& o, std::ostream& out) {
    return with_dim(o, [&](auto dim) {
        constexpr std::size_t N = decltype(dim)::value;
        const auto m = modulus_of(o);
        out << mul(vec_arg<N>(o.a, m, "a"), vec_arg<N>(o.b, m, "b"), params_arg<N>(o.params, m)) << '\n';
        return 0;
    });
}

int run_pow(const Options& o, std::ostream& out) {
    return with_dim(o, [&](auto dim) {
        constexpr std::size_t N = decltype(dim)::value;
        const auto m = modulus_of(o);
        const auto a = vec_arg<N>(o.a, m, "a");
        const auto params = params_arg<N>(o.params, m);
        const auto fast = pow_fast(a, o.n, params);
        if (o.check_iter) {
            const auto iter = pow_iter(a, o.n, params);
            if (!(iter == fast)) {
                throw Error("pow_fast " + fast.to_string() + " disagrees with pow_iter " + iter.to_string());
            }
        }
        out << fast << '\n';
        return 0;
    });
}

int run_check(const Options& o, std::ostream& out) {
    return with_dim(o, [&](auto dim) {
        constexpr std::size_t N = decltype(dim)::value;
        const auto m = modulus_of(o);
        const auto a = vec_arg<N>(o.a, m, "a");
        const auto params = params_arg<N>(o.params, m);
        const std::vector<std::string> known = {"associativity", "commutativity", "identity", "power-of-power"};
        if (o.property != "all" && std::find(known.begin(), known.end(), o.property) == known.end()) {
            throw UsageError("unknown property '" + o.property + "'");
        }
        bool all_hold = true;
        for (const auto& name : known) {
            if (o.property != "all" && o.property != name) continue;
            PropertyCheck r;
            if (name == "associativity") r = check_power_associativity(a, params, o.max_n);
            if (name == "commutativity") r = check_internal_commutativity(a, params, o.grid, o.grid);
            if (name == "identity") r = check_power_identity(a, params, o.grid, o.grid);
            if (name == "power-of-power") r = check_power_of_power(a, params, o.grid, o.grid);
            out << name << ": " << (r.holds ? "holds" : "FAILS " + r.counterexample) << '\n';
            all_hold = all_hold && r.holds;
        }
        return all_hold ? 0 : 1;
    });
}

// ---------------------------------------------------------------------------
// sym

int run_sym_expand(const Options& o, std::ostream& out) {
    if (o.sym_n < 1 || o.sym_n > sym::kMaxSymbolicPower) throw UsageError("--n must be in [1, 8]");
    if (o.component < -1 || o.component > 2) throw UsageError("--component must be 0, 1, 2 or -1 for all");
    const std::string format = o.format.empty() ? "pretty" : o.format;
    if (format != "pretty" && format != "listing") throw UsageError("--format must be pretty or listing");
    const auto v = sym::sym_pow(o.sym_n);
    for (int i = 0; i < 3; ++i) {
        if (o.component != -1 && o.component != i) continue;
        if (format == "pretty") {
            out << "(a^" << o.sym_n << ")_" << i << " = " << v[i].to_string() << '\n';
        } else {
            out << "# component " << i << ": coeff a0 a1 a2 A B C D E\n" << v[i].to_listing();
        }
    }
    return 0;
}

int run_sym_verify(std::ostream& out) {
    const auto gen = sym::generic_vector();
    const auto a2 = sym::sym_pow(2);
    const auto a3 = sym::sym_pow(3);
    const auto ref2 = sym::reference_a2();
    const auto ref3 = sym::reference_a3();
    const std::vector<std::pair<std::string, bool>> checks = {
        {"a^2 equals the printed closed form", a2 == ref2},
        {"a^2 equals the g/h decomposition", a2 == sym::sym_square_gh(gen)},
        {"(a^3)_0 equals the printed closed form", a3[0] == ref3[0]},
        {"(a^3)_1, (a^3)_2 equal the factored transcription", a3[1] == ref3[1] && a3[2] == ref3[2]},
        {"all parenthesizations agree for n <= 5", sym::symbolic_power_associative(5)},
    };
    bool ok = true;
    for (const auto& [name, pass] : checks) {
        out << (pass ? "ok   " : "FAIL ") << name << '\n';
        ok = ok && pass;
    }
    return ok ? 0 : 1;
}

int run_sym_count(const Options& o, std::ostream& out) {
    if (o.sym_max_n < 1 || o.sym_max_n > sym::kMaxSymbolicPower) throw UsageError("--max-n must be in [1, 8]");
    out << "n,a_monomials,bound,monomials\n";
    for (unsigned n = 1; n <= o.sym_max_n; ++n) {
        const auto v = sym::sym_pow(n);
        out << n << ',' << sym::a_monomial_count(v[0]) << ',' << sym::a_monomial_bound(n) << ','
            << sym::monomial_count(v[0]) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// orbit

void print_census_summary(const CensusReport& r, std::ostream& out) {
    out << "p=" << r.p() << " params=" << r.params.to_string() << " starts=" << r.total_starts
        << " distinct_cycles=" << r.distinct_cycles << " scan_orbits=" << r.scan_orbits << '\n';
    out << "length,name,element,cycle,scan,cycle_count\n";
    for (const auto& s : special_lengths(r.p())) {
        out << s.length << ',' << s.name;
        for (auto m : kAllMeasures) out << ',' << percent(r.proportion(m, s.length));
        out << ',' << r.count(OrbitMeasure::cycle, s.length) << '\n';
    }
}

int run_orbit_length(const Options& o, std::ostream& out) {
    const auto params = params3(o);
    const auto rec = orbit_length(vec_arg<3>(o.a, params.modulus, "a"), params);
    out << "start=" << rec.start << " tail=" << rec.tail << " period=" << rec.period << " cycle_rep=" << rec.cycle_rep
        << '\n';
    return 0;
}

int run_orbit_scan(const Options& o, std::ostream& out) {
    const auto params = params3(o);
    ScanOptions so;
    so.threads = o.threads;
    so.max_p = static_cast<std::uint32_t>(std::min<u64>(o.max_p, UINT32_MAX));
    const auto report = scan_space(params, so);
    if (!o.out.empty()) {
        auto f = open_out(o.out);
        write_census_csv(f, report);
    }
    if (!o.json_out.empty()) open_out(o.json_out) << census_json(report) << '\n';
    print_census_summary(report, out);
    return 0;
}

int run_orbit_sweep(const Options& o, std::ostream& out) {
    const auto m = modulus_of(o);
    ScanOptions so;
    so.threads = o.threads;
    so.max_p = static_cast<std::uint32_t>(std::min<u64>(o.max_p, UINT32_MAX));
    const auto ar = range_arg(o.a_range, m.value(), "a-range");
    const auto br = range_arg(o.b_range, m.value(), "b-range");
    const auto cde = residues<3>({o.c, o.d, o.e}, m, "c/d/e");
    const auto sweep = param_sweep(m.value(), ar, br, cde[0].value, cde[1].value, cde[2].value, so);
    if (!o.out.empty()) {
        auto f = open_out(o.out);
        bool header = true;
        for (const auto& r : sweep.reports) {
            write_census_csv(f, r, header);
            header = false;
        }
    }
    if (!o.json_out.empty()) open_out(o.json_out) << sweep_json(sweep) << '\n';
    out << "subset,reports,measure,length,min,mean,max\n";
    const auto specials = special_lengths(m.value());
    for (const auto* agg : {&sweep.all, &sweep.nonzero_distinct}) {
        for (auto meas : kAllMeasures) {
            for (std::size_t si = 0; si < specials.size(); ++si) {
                const auto& s = agg->at(meas, si);
                out << agg->label << ',' << agg->reports << ',' << to_string(meas) << ',' << specials[si].name << ','
                    << percent(s.min) << ',' << percent(s.mean) << ',' << percent(s.max) << '\n';
            }
        }
    }
    return 0;
}

int run_orbit_search(const Options& o, std::ostream& out) {
    const auto params = params3(o);
    std::vector<std::uint32_t> seconds;
    for (u64 s : parse_list(o.seconds, "seconds")) seconds.push_back(static_cast<std::uint32_t>(s % params.modulus.value()));
    const u64 budget = o.budget ? o.budget : 2 * params.modulus.value();
    const auto r = heuristic_search(params, budget, seconds);
    out << "trials=" << r.trials << " maximal=" << r.maximal.size() << '\n';
    for (const auto& rec : r.maximal) out << rec.start << " tail=" << rec.tail << " period=" << rec.period << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// prng

std::vector<std::size_t> pattern_arg(const Options& o) {
    if (o.pattern.empty()) throw UsageError("--pattern is required");
    std::vector<std::size_t> pattern;
    for (u64 v : parse_list(o.pattern, "pattern")) pattern.push_back(static_cast<std::size_t>(v));
    return pattern;
}

PrngConfig prng_config(const Options& o) {
    const auto params = params3(o);
    const auto& m = params.modulus;
    if (o.seeds.empty()) throw UsageError("--seeds is required (vectors separated by ';')");
    std::vector<Vector3> seeds;
    for (const auto& s : split(o.seeds, ';')) seeds.push_back(vec_arg<3>(s, m, "seeds"));
    if (o.side != "right" && o.side != "left") throw UsageError("--side must be right or left");
    PrngConfig c{params, seeds, pattern_arg(o), vec_arg<3>(o.initial, m, "initial"),
                 o.side == "left" ? MultiplySide::left : MultiplySide::right};
    validate(c);
    return c;
}

int run_prng_run(const Options& o, std::ostream& out) {
    const auto config = prng_config(o);
    auto state = prng_init(config);
    const std::string format = o.format.empty() ? "csv" : o.format;
    if (format == "bytes") {
        const auto bytes = prng_bytes(state, config, static_cast<std::size_t>(o.count));
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        return 0;
    }
    if (format != "csv") throw UsageError("--format must be csv or bytes");
    out << "step,x0,x1,x2\n";
    for (u64 i = 1; i <= o.count; ++i) {
        const auto v = prng_step(state, config);
        out << i << ',' << v.value(0) << ',' << v.value(1) << ',' << v.value(2) << '\n';
    }
    return 0;
}

int run_prng_cycle(const Options& o, std::ostream& out) {
    const auto config = prng_config(o);
    const auto c = prng_cycle_length(config, o.cap);
    out << "state_space=" << prng_state_space(config);
    if (c.found) {
        out << " tail=" << c.tail << " period=" << c.period << '\n';
    } else {
        out << " period exceeds cap\n";
    }
    return 0;
}

int run_prng_uniformity(const Options& o, std::ostream& out) {
    const auto config = prng_config(o);
    const u64 samples = o.samples ? o.samples : 1000000;
    const auto s = uniformity_stats(config, samples);
    if (!o.out.empty()) {
        auto f = open_out(o.out);
        f << "value,x0,x1,x2\n";
        for (std::size_t v = 0; v < config.p(); ++v) {
            f << v << ',' << s.counts[0][v] << ',' << s.counts[1][v] << ',' << s.counts[2][v] << '\n';
        }
    }
    out << "samples=" << s.samples << " max_relative_deviation=" << percent(s.max_relative_deviation)
        << " chi_square=" << std::fixed << std::setprecision(2) << s.chi_square[0] << ',' << s.chi_square[1] << ','
        << s.chi_square[2] << " dof=" << config.p() - 1 << '\n';
    return 0;
}

int run_prng_search(const Options& o, std::ostream& out) {
    const auto params = params3(o);
    SeedSearchOptions so;
    so.trials = o.trials;
    so.rng_seed = o.seed;
    so.keep = o.keep;
    so.threads = o.threads;
    so.cap = o.cap;
    const auto pattern = pattern_arg(o);
    const auto board = seed_search(params, pattern, so);
    const u64 p = params.modulus.value();
    const u64 bound = pattern.size() * (p * p * p - 1);
    out << "rank,period,tail,fraction_of_max,seeds,initial\n";
    for (std::size_t i = 0; i < board.size(); ++i) {
        const auto& e = board[i];
        out << i + 1 << ',' << e.cycle.period << ',' << e.cycle.tail << ','
            << percent(static_cast<double>(e.cycle.period) / static_cast<double>(bound)) << ',';
        for (std::size_t s = 0; s < e.config.seeds.size(); ++s) out << (s ? ";" : "") << e.config.seeds[s];
        out << ',' << e.config.initial << '\n';
    }
    if (!o.save.empty()) {
        if (board.empty()) throw Error("no configuration to save (trials = 0)");
        open_out(o.save) << prng_config_to_json(board.front().config) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// dip

int run_dip_solve(const Options& o, std::ostream& out) {
    return with_dim(o, [&](auto dim) {
        constexpr std::size_t N = decltype(dim)::value;
        const auto m = modulus_of(o);
        const DipInstance<N> inst{vec_arg<N>(o.base, m, "base"), vec_arg<N>(o.target, m, "target"),
                                  params_arg<N>(o.params, m), o.cap ? o.cap : (u64{1} << 24)};
        const auto r = dip_bruteforce(inst);
        if (r.exponent) {
            out << "n=" << *r.exponent << " steps=" << r.steps << '\n';
        } else {
            out << "not found within cap " << inst.cap << " steps=" << r.steps << '\n';
        }
        return 0;
    });
}

int run_dip_timing(const Options& o, std::ostream& out) {
    const auto params = params3(o);
    std::vector<u64> exps;
    if (o.exponents.empty()) {
        for (int k = 10; k <= 16; ++k) exps.push_back(u64{1} << k);
    } else {
        exps = parse_list(o.exponents, "exponents");
    }
    for (u64 n : exps) {
        if (n == 0) throw UsageError("exponents must be positive");
    }
    const auto rows = dip_timing(params, o.samples ? o.samples : 10, exps, o.seed);
    if (!o.out.empty()) {
        auto f = open_out(o.out);
        write_dip_timing_csv(f, rows, o.with_time);
    }
    write_dip_timing_csv(out, rows, o.with_time);
    return 0;
}

// ---------------------------------------------------------------------------
// kx

kx::AnyPublicParams kx_public(const Options& o) {
    const auto m = modulus_of(o);
    std::optional<kx::AnyPublicParams> pub;
    with_dim(o, [&](auto dim) {
        constexpr std::size_t N = decltype(dim)::value;
        kx::PublicParams<N> p{params_arg<N>(o.params, m), vec_arg<N>(o.base, m, "base")};
        kx::validate(p);
        pub = p;
        return 0;
    });
    return *pub;
}

Rng kx_rng(const Options& o, u64 stream = 0) {
    if (!o.seed_given) {
        std::random_device rd;
        return Rng((u64{rd()} << 32) ^ rd());
    }
    std::seed_seq seq{o.seed, stream};
    return Rng(seq);
}

kx::SharedKeyMode kx_mode(const Options& o) {
    return o.additive ? kx::SharedKeyMode::insecure_additive : kx::SharedKeyMode::multiplicative;
}

int run_kx_demo(const Options& o, std::ostream& out) {
    const auto pub = kx_public(o);
    Rng rng = kx_rng(o);
    const bool match = std::visit(
        [&](const auto& p) {
            const auto t = kx::run_local_exchange(p, o.bits, rng, kx_mode(o));
            out << kx::transcript_json(t) << '\n';
            return t.keys_match;
        },
        pub);
    return match ? 0 : 1;
}

int run_kx_listen(const Options& o, std::ostream& out, std::ostream& err) {
    std::optional<kx::AnyPublicParams> expected;
    if (!o.params.empty() || !o.base.empty() || o.p != 0) expected = kx_public(o);
    const auto timeout = std::chrono::milliseconds(o.timeout_ms);
    auto listener = TcpListener::bind(o.host, o.port);
    err << "listening on " << o.host << ':' << listener.port() << std::endl;

    // One thread per connection; sessions share nothing but the output lock.
    std::mutex mu;
    int failures = 0;
    std::vector<std::thread> workers;
    for (unsigned i = 0; i < o.sessions; ++i) {
        auto stream = std::make_shared<TcpStream>(listener.accept(timeout));
        workers.emplace_back([&, stream, i] {
            Rng rng = kx_rng(o, i);
            try {
                const auto r = kx::run_session(kx::Role::responder, *stream, expected, o.bits, rng, kx_mode(o));
                std::lock_guard lock(mu);
                out << kx::session_json(r, kx::Role::responder, kx_mode(o)) << std::endl;
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                err << "error: " << e.what() << std::endl;
                ++failures;
            }
        });
    }
    for (auto& w : workers) w.join();
    return failures == 0 ? 0 : 1;
}

int run_kx_connect(const Options& o, std::ostream& out) {
    if (o.port == 0) throw UsageError("--port is required");
    const auto pub = kx_public(o);
    auto stream = TcpStream::connect(o.host, o.port, std::chrono::milliseconds(o.timeout_ms));
    Rng rng = kx_rng(o);
    const auto r = kx::run_session(kx::Role::initiator, stream, pub, o.bits, rng, kx_mode(o));
    out << kx::session_json(r, kx::Role::initiator, kx_mode(o)) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// Command tree

struct Tree {
    CLI::App app{"Multilinear magma toolkit: arithmetic, orbits, PRNG, DIP and key exchange", "mlmagma"};
    Options o;
    std::vector<std::pair<CLI::App*, std::function<int(std::ostream&, std::ostream&)>>> leaves;
};

void add_field_opts(CLI::App* c, Options& o) {
    c->add_option("--p", o.p, "Prime modulus");
    c->add_option("--params", o.params, "Operation coefficients, comma separated (5 for K^3, 9 for K^4)");
}

std::unique_ptr<Tree> build_tree() {
    auto t = std::make_unique<Tree>();
    auto& app = t->app;
    auto& o = t->o;
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--threads", o.threads, "Worker threads for data-parallel commands (0 = all cores)");
    app.add_option("--config", o.config, "JSON file of option values; command-line flags take precedence");

    auto leaf = [&](CLI::App* c, auto fn) {
        c->fallthrough();
        t->leaves.emplace_back(c, fn);
    };

    auto* mul_cmd = app.add_subcommand("mul", "Multiply two vectors");
    add_field_opts(mul_cmd, o);
    mul_cmd->add_option("--a", o.a, "Left factor");
    mul_cmd->add_option("--b", o.b, "Right factor");
    leaf(mul_cmd, [&o](std::ostream& out, std::ostream&) { return run_mul(o, out); });

    auto* pow_cmd = app.add_subcommand("pow", "Power a^n");
    add_field_opts(pow_cmd, o);
    pow_cmd->add_option("--a", o.a, "Base vector");
    pow_cmd->add_option("--n", o.n, "Exponent (0 gives the identity)");
    pow_cmd->add_flag("--check-iter", o.check_iter, "Cross-check against n-1 successive products");
    leaf(pow_cmd, [&o](std::ostream& out, std::ostream&) { return run_pow(o, out); });

    auto* check_cmd = app.add_subcommand("check", "Test power associativity, internal commutativity, power identity");
    add_field_opts(check_cmd, o);
    check_cmd->add_option("--a", o.a, "Element to test");
    check_cmd->add_option("--property", o.property,
                          "associativity | commutativity | identity | power-of-power | all");
    check_cmd->add_option("--max-n", o.max_n, "Largest degree for parenthesization checks (3..8)");
    check_cmd->add_option("--grid", o.grid, "Exponent grid size for the other checks");
    leaf(check_cmd, [&o](std::ostream& out, std::ostream&) { return run_check(o, out); });

    auto* sym_cmd = app.add_subcommand("sym", "Symbolic expansion of powers of a generic K^3 vector");
    sym_cmd->require_subcommand(1);
    auto* expand = sym_cmd->add_subcommand("expand", "Print a^n");
    expand->add_option("--n", o.sym_n, "Power, 1..8");
    expand->add_option("--component", o.component, "0, 1, 2, or -1 for all");
    expand->add_option("--format", o.format, "pretty | listing");
    leaf(expand, [&o](std::ostream& out, std::ostream&) { return run_sym_expand(o, out); });
    auto* verify = sym_cmd->add_subcommand("verify", "Compare expansions with the closed forms");
    leaf(verify, [](std::ostream& out, std::ostream&) { return run_sym_verify(out); });
    auto* count = sym_cmd->add_subcommand("count", "Monomial counts of (a^n)_0 against the bound");
    count->add_option("--max-n", o.sym_max_n, "Largest power, 1..8");
    leaf(count, [&o](std::ostream& out, std::ostream&) { return run_sym_count(o, out); });

    auto* orbit_cmd = app.add_subcommand("orbit", "Power-orbit analysis over Z_p^3");
    orbit_cmd->require_subcommand(1);
    auto* length = orbit_cmd->add_subcommand("length", "Tail and period of one start");
    add_field_opts(length, o);
    length->add_option("--a", o.a, "Start vector");
    leaf(length, [&o](std::ostream& out, std::ostream&) { return run_orbit_length(o, out); });
    auto* scan = orbit_cmd->add_subcommand("scan", "Census over all p^3 starts");
    add_field_opts(scan, o);
    scan->add_option("--out", o.out, "CSV output path");
    scan->add_option("--json", o.json_out, "JSON summary path");
    scan->add_option("--max-p", o.max_p, "Largest modulus accepted for a full scan");
    leaf(scan, [&o](std::ostream& out, std::ostream&) { return run_orbit_scan(o, out); });
    auto* sweep = orbit_cmd->add_subcommand("sweep", "Census for every (A, B) with C, D, E fixed");
    sweep->add_option("--p", o.p, "Prime modulus");
    sweep->add_option("--a-range", o.a_range, "A range lo:hi (default all)");
    sweep->add_option("--b-range", o.b_range, "B range lo:hi (default all)");
    sweep->add_option("--c", o.c, "C");
    sweep->add_option("--d", o.d, "D");
    sweep->add_option("--e", o.e, "E");
    sweep->add_option("--out", o.out, "CSV output path (all reports)");
    sweep->add_option("--json", o.json_out, "JSON summary path");
    sweep->add_option("--max-p", o.max_p, "Largest modulus accepted for a full scan");
    leaf(sweep, [&o](std::ostream& out, std::ostream&) { return run_orbit_sweep(o, out); });
    auto* search = orbit_cmd->add_subcommand("search", "Look for period p^2-1 among starts (0, s, x)");
    add_field_opts(search, o);
    search->add_option("--budget", o.budget, "Starts to try (default 2p)");
    search->add_option("--seconds", o.seconds, "Second components s to try, comma separated");
    leaf(search, [&o](std::ostream& out, std::ostream&) { return run_orbit_search(o, out); });

    auto* prng_cmd = app.add_subcommand("prng", "Multi-element pattern generator");
    prng_cmd->require_subcommand(1);
    auto prng_opts = [&o](CLI::App* c) {
        add_field_opts(c, o);
        c->add_option("--seeds", o.seeds, "Seed vectors, e.g. 0,1,5;0,2,7");
        c->add_option("--pattern", o.pattern, "Seed indices, comma separated");
        c->add_option("--initial", o.initial, "Initial vector");
        c->add_option("--side", o.side, "right (state * seed) or left (seed * state)");
    };
    auto* run = prng_cmd->add_subcommand("run", "Emit the stream");
    prng_opts(run);
    run->add_option("--count", o.count, "Vectors (csv) or bytes (bytes) to emit");
    run->add_option("--format", o.format, "csv | bytes");
    leaf(run, [&o](std::ostream& out, std::ostream&) { return run_prng_run(o, out); });
    auto* cycle = prng_cmd->add_subcommand("cycle", "Tail and period of the composite state");
    prng_opts(cycle);
    cycle->add_option("--cap", o.cap, "Step cap (0 = enough for any configuration)");
    leaf(cycle, [&o](std::ostream& out, std::ostream&) { return run_prng_cycle(o, out); });
    auto* uni = prng_cmd->add_subcommand("uniformity", "Per-component value frequencies");
    prng_opts(uni);
    uni->add_option("--samples", o.samples, "Stream length (default 10^6)");
    uni->add_option("--out", o.out, "CSV of counts per value");
    leaf(uni, [&o](std::ostream& out, std::ostream&) { return run_prng_uniformity(o, out); });
    auto* psearch = prng_cmd->add_subcommand("search", "Random search for long composite periods");
    add_field_opts(psearch, o);
    psearch->add_option("--pattern", o.pattern, "Seed indices, comma separated");
    psearch->add_option("--trials", o.trials, "Configurations to try");
    psearch->add_option("--seed", o.seed, "Search RNG seed");
    psearch->add_option("--keep", o.keep, "Leaderboard size");
    psearch->add_option("--cap", o.cap, "Per-trial step cap (0 = automatic)");
    psearch->add_option("--save", o.save, "Write the best configuration as JSON");
    leaf(psearch, [&o](std::ostream& out, std::ostream&) { return run_prng_search(o, out); });

    auto* dip_cmd = app.add_subcommand("dip", "Discrete iteration problem by exhaustive search");
    dip_cmd->require_subcommand(1);
    auto* solve = dip_cmd->add_subcommand("solve", "Find the smallest n with base^n = target");
    add_field_opts(solve, o);
    solve->add_option("--base", o.base, "Base vector");
    solve->add_option("--target", o.target, "Target vector");
    solve->add_option("--cap", o.cap, "Largest exponent to try (default 2^24)");
    leaf(solve, [&o](std::ostream& out, std::ostream&) { return run_dip_solve(o, out); });
    auto* timing = dip_cmd->add_subcommand("timing", "Step counts of the search for a range of exponents");
    add_field_opts(timing, o);
    timing->add_option("--samples", o.samples, "Random bases per exponent (default 10)");
    timing->add_option("--exponents", o.exponents, "Exponents, comma separated (default 2^10..2^16)");
    timing->add_option("--seed", o.seed, "RNG seed");
    timing->add_flag("--with-time", o.with_time, "Add a wall-clock column (not reproducible)");
    timing->add_option("--out", o.out, "CSV output path");
    leaf(timing, [&o](std::ostream& out, std::ostream&) { return run_dip_timing(o, out); });

    auto* kx_cmd = app.add_subcommand("kx", "Key exchange");
    kx_cmd->require_subcommand(1);
    auto kx_opts = [&o](CLI::App* c) {
        add_field_opts(c, o);
        c->add_option("--base", o.base, "Public base vector");
        c->add_option("--bits", o.bits, "Secret exponent size in bits (2..64)");
        c->add_option("--seed", o.seed, "Deterministic randomness (test mode)")->each([&o](const std::string&) {
            o.seed_given = true;
        });
        c->add_flag("--additive", o.additive, "Use the insecure additive key a^(m+n)");
    };
    auto* demo = kx_cmd->add_subcommand("demo", "Both parties in one process");
    kx_opts(demo);
    leaf(demo, [&o](std::ostream& out, std::ostream&) { return run_kx_demo(o, out); });
    auto* listen = kx_cmd->add_subcommand("listen", "Responder over TCP");
    kx_opts(listen);
    listen->add_option("--host", o.host, "IPv4 address to bind");
    listen->add_option("--port", o.port, "Port (0 picks a free one)");
    listen->add_option("--sessions", o.sessions, "Connections to serve before exiting");
    listen->add_option("--timeout-ms", o.timeout_ms, "Accept and read timeout");
    leaf(listen, [&o](std::ostream& out, std::ostream& err) { return run_kx_listen(o, out, err); });
    auto* connect = kx_cmd->add_subcommand("connect", "Initiator over TCP");
    kx_opts(connect);
    connect->add_option("--host", o.host, "Responder host");
    connect->add_option("--port", o.port, "Responder port");
    connect->add_option("--timeout-ms", o.timeout_ms, "Connect and read timeout");
    leaf(connect, [&o](std::ostream& out, std::ostream&) { return run_kx_connect(o, out); });

    return t;
}

CLI::App* selected_leaf(Tree& t) {
    for (auto& [cmd, fn] : t.leaves) {
        if (cmd->parsed()) return cmd;
    }
    return nullptr;
}

std::string leaf_path(CLI::App* leaf) {
    std::string path;
    for (CLI::App* c = leaf; c != nullptr && c->get_parent() != nullptr; c = c->get_parent()) {
        path = c->get_name() + (path.empty() ? "" : " " + path);
    }
    return path;
}

std::string config_value(const Json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<u64>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_array()) {
        std::string joined;
        for (std::size_t i = 0; i < v.size(); ++i) {
            // Arrays of arrays (seed lists) join their rows with ';'.
            joined += (i ? (v[i].is_array() ? ";" : ",") : "") + config_value(v[i], key);
        }
        return joined;
    }
    throw UsageError("config: unsupported value for '" + key + "'");
}

/// Appends "--key value" for every config entry not already given on the
/// command line. Unknown keys are rejected.
std::vector<std::string> merge_config(Tree& t, std::vector<std::string> args) {
    std::ifstream f(t.o.config);
    if (!f) throw UsageError("cannot read config '" + t.o.config + "'");
    Json doc;
    try {
        doc = Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw UsageError("config: top level must be an object");
    CLI::App* leaf = selected_leaf(t);
    for (const auto& [raw_key, value] : doc.items()) {
        std::string key = raw_key;
        std::replace(key.begin(), key.end(), '_', '-');
        CLI::Option* opt = nullptr;
        for (CLI::App* c = leaf; c != nullptr && opt == nullptr; c = c->get_parent()) {
            opt = c->get_option_no_throw("--" + key);
        }
        if (opt == nullptr || key == "config") {
            throw UsageError("config: unknown key '" + raw_key + "' for '" + leaf_path(leaf) + "'");
        }
        if (opt->count() > 0) continue;
        if (opt->get_expected_max() == 0) {
            if (!value.is_boolean()) throw UsageError("config: '" + raw_key + "' must be true or false");
            if (value.get<bool>()) args.push_back("--" + key);
            continue;
        }
        if (value.is_boolean() || value.is_null() || value.is_object()) {
            throw UsageError("config: unsupported value for '" + raw_key + "'");
        }
        args.push_back("--" + key);
        args.push_back(config_value(value, raw_key));
    }
    return args;
}

void parse(std::unique_ptr<Tree>& t, std::vector<std::string> args) {
    t = build_tree();
    // CLI11 consumes the vector from the back.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    t->app.parse(reversed);
    if (t->o.config.empty()) return;
    auto merged = merge_config(*t, std::move(args));
    t = build_tree();
    reversed.assign(merged.rbegin(), merged.rend());
    t->app.parse(reversed);
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::unique_ptr<Tree> tree;
    try {
        parse(tree, args);
    } catch (const CLI::ParseError& e) {
        const int rc = tree->app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    CLI::App* leaf = selected_leaf(*tree);
    try {
        for (auto& [cmd, fn] : tree->leaves) {
            if (cmd == leaf) return fn(out, err);
        }
        err << "error: no command selected\n";
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace mlm::cli
