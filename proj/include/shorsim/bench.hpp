#pragma once

// Benchmark harness over the factoring suite and its report formats.

#include "shorsim/error.hpp"
#include "shorsim/perfmodel.hpp"
#include "shorsim/qft.hpp"
#include "shorsim/shor.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace shorsim {

inline constexpr double kDefaultTargetBudgetS = 3600.0;

inline const std::vector<u64>& table3_small_suite() {
    static const std::vector<u64> s{77, 143, 231, 255};
    return s;
}

inline const std::vector<u64>& table3_full_suite() {
    static const std::vector<u64> s{77, 143, 323, 551, 589, 231, 255, 399, 423, 539};
    return s;
}

/// Published cofactor multisets for the full suite.
inline const std::map<u64, std::vector<u64>>& table3_cofactors() {
    static const std::map<u64, std::vector<u64>> c{
        {77, {7, 11}},      {143, {11, 13}},    {323, {17, 19}},   {551, {19, 29}},   {589, {19, 31}},
        {231, {3, 7, 11}}, {255, {3, 5, 17}}, {399, {3, 7, 19}}, {423, {3, 3, 47}}, {539, {7, 7, 11}},
    };
    return c;
}

enum class RecordStatus { finished, attempts_exhausted, time_budget, memory_guard };

inline std::string_view to_string(RecordStatus s) {
    switch (s) {
    case RecordStatus::finished: return "finished";
    case RecordStatus::attempts_exhausted: return "attempts_exhausted";
    case RecordStatus::time_budget: return "time_budget";
    case RecordStatus::memory_guard: return "memory_guard";
    }
    return "?";
}

inline RecordStatus record_status_from_string(std::string_view s) {
    for (auto v : {RecordStatus::finished, RecordStatus::attempts_exhausted, RecordStatus::time_budget,
                   RecordStatus::memory_guard}) {
        if (to_string(v) == s) return v;
    }
    throw InvalidInput("unknown record status '" + std::string(s) + "'");
}

struct BenchRecord {
    u64 n = 0;
    std::vector<u64> cofactors;
    Engine engine = Engine::dense;
    KernelPlan plan;
    u64 seed = 0;
    double wall_time_s = 0.0;
    PhaseTimes phase_fractions;
    bool succeeded = false;
    RecordStatus status = RecordStatus::finished;
    u64 attempts = 0;

    friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct BenchOptions {
    std::vector<Engine> engines{Engine::fft};
    ShorConfig base; // n and kernel are overwritten per run
    bool parallel_targets = false;

    BenchOptions() { base.time_budget_s = kDefaultTargetBudgetS; }
};

inline BenchRecord run_benchmark_target(u64 n, Engine engine, const BenchOptions& opt) {
    ShorConfig cfg = opt.base;
    cfg.n = n;
    cfg.kernel = engine;
    cfg.base_override.reset();
    cfg.on_attempt = nullptr;
    cfg.on_transformed = nullptr;

    BenchRecord rec;
    rec.n = n;
    rec.engine = engine;
    rec.plan = cfg.plan;
    rec.seed = cfg.seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        const ShorResult r = run_shor(cfg);
        rec.cofactors = r.factors;
        rec.succeeded = r.succeeded;
        rec.attempts = r.attempts.size();
        if (!r.attempts.empty()) rec.phase_fractions = profile_phases(r);
        rec.status = r.succeeded                             ? RecordStatus::finished
                     : r.stop == StopReason::time_budget     ? RecordStatus::time_budget
                                                             : RecordStatus::attempts_exhausted;
    } catch (const ResourceLimit&) {
        rec.succeeded = false;
        rec.status = RecordStatus::memory_guard;
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

/// Runs every target under every engine. Unfinished runs are recorded, not thrown.
inline std::vector<BenchRecord> run_benchmark_suite(const std::vector<u64>& targets, const BenchOptions& opt) {
    for (u64 n : targets) {
        if (n < 3) throw InvalidInput("benchmark target " + std::to_string(n) + " is below 3");
        if (is_prime(n)) throw NothingToFactor("benchmark target " + std::to_string(n) + " is prime");
    }
    std::vector<BenchRecord> records;
    records.reserve(targets.size() * opt.engines.size());
    if (!opt.parallel_targets) {
        for (u64 n : targets) {
            for (Engine e : opt.engines) records.push_back(run_benchmark_target(n, e, opt));
        }
        return records;
    }
    std::vector<std::future<BenchRecord>> pending;
    for (u64 n : targets) {
        for (Engine e : opt.engines) {
            pending.push_back(std::async(std::launch::async, [n, e, &opt] { return run_benchmark_target(n, e, opt); }));
        }
    }
    for (auto& f : pending) records.push_back(f.get());
    return records;
}

enum class ReportFormat { csv, json, markdown };

inline ReportFormat report_format_from_string(std::string_view s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    if (s == "markdown" || s == "md") return ReportFormat::markdown;
    throw InvalidInput("unknown report format '" + std::string(s) + "'");
}

inline constexpr std::string_view kCsvHeader =
    "n,cofactors,engine,block_size,tiles,workers,seed,wall_time_s,qft_fraction,succeeded";

inline std::string join_factors(const std::vector<u64>& f, std::string_view sep = "x") {
    std::string s;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(f[i]);
    }
    return s;
}

namespace detail {

inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::vector<u64> parse_factors(const std::string& s) {
    std::vector<u64> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, 'x')) {
        if (!tok.empty()) out.push_back(parse_u64(tok, "cofactor"));
    }
    return out;
}

} // namespace detail

inline std::string emit_csv(const std::vector<BenchRecord>& records) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.n) + ',' + join_factors(r.cofactors) + ',' + std::string(to_string(r.engine)) + ',' +
               std::to_string(r.plan.block_size) + ',' + std::to_string(r.plan.tiles) + ',' +
               std::to_string(r.plan.workers) + ',' + std::to_string(r.seed) + ',' + detail::fixed(r.wall_time_s, 6) +
               ',' + detail::fixed(r.phase_fractions[Phase::qft], 6) + ',' + (r.succeeded ? "true" : "false") + '\n';
    }
    return out;
}

inline nlohmann::json to_json(const BenchRecord& r) {
    nlohmann::json phases = nlohmann::json::object();
    for (Phase p : kAllPhases) phases[std::string(to_string(p))] = r.phase_fractions[p];
    return {
        {"n", r.n},
        {"cofactors", r.cofactors},
        {"engine", to_string(r.engine)},
        {"block_size", r.plan.block_size},
        {"tiles", r.plan.tiles},
        {"workers", r.plan.workers},
        {"seed", r.seed},
        {"wall_time_s", r.wall_time_s},
        {"phase_fractions", phases},
        {"succeeded", r.succeeded},
        {"status", to_string(r.status)},
        {"attempts", r.attempts},
    };
}

inline BenchRecord record_from_json(const nlohmann::json& j) {
    BenchRecord r;
    r.n = j.at("n").get<u64>();
    r.cofactors = j.at("cofactors").get<std::vector<u64>>();
    const auto engine = engine_from_string(j.at("engine").get<std::string>());
    if (!engine) throw InvalidInput("report: unknown engine");
    r.engine = *engine;
    r.plan.block_size = j.at("block_size").get<u64>();
    r.plan.tiles = j.at("tiles").get<u64>();
    r.plan.workers = j.at("workers").get<unsigned>();
    r.seed = j.at("seed").get<u64>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    for (Phase p : kAllPhases) r.phase_fractions[p] = j.at("phase_fractions").at(std::string(to_string(p))).get<double>();
    r.succeeded = j.at("succeeded").get<bool>();
    r.status = record_status_from_string(j.at("status").get<std::string>());
    r.attempts = j.at("attempts").get<u64>();
    return r;
}

inline std::string emit_json(const std::vector<BenchRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
}

inline std::vector<BenchRecord> parse_json_report(std::string_view text) {
    std::vector<BenchRecord> out;
    try {
        for (const auto& j : nlohmann::json::parse(text)) out.push_back(record_from_json(j));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("report: ") + e.what());
    }
    return out;
}

/// Per-engine speedup rows built from finished records only.
inline std::vector<SpeedupRow> speedup_rows(const std::vector<BenchRecord>& records, const std::vector<Engine>& engines) {
    std::vector<SpeedupRow> rows;
    for (Engine e : engines) {
        SpeedupRow row{std::string(to_string(e)), {}};
        for (const auto& r : records) {
            if (r.engine == e && r.succeeded) row.timings[r.n] = r.wall_time_s;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Grid of wall times, one row per target and one column per engine. With two
/// or more engines a speed-up footer is added, relative to fft when present.
inline std::string emit_markdown(const std::vector<BenchRecord>& records) {
    std::vector<u64> targets;
    std::vector<Engine> engines;
    for (const auto& r : records) {
        if (std::find(targets.begin(), targets.end(), r.n) == targets.end()) targets.push_back(r.n);
        if (std::find(engines.begin(), engines.end(), r.engine) == engines.end()) engines.push_back(r.engine);
    }

    std::ostringstream os;
    os << "| n | Cofactors |";
    for (Engine e : engines) os << " T_" << to_string(e) << " [s] |";
    os << "\n|---:|:---|";
    for (std::size_t i = 0; i < engines.size(); ++i) os << "---:|";
    os << '\n';

    for (u64 n : targets) {
        std::string cofactors;
        for (const auto& r : records) {
            if (r.n == n && r.succeeded) {
                cofactors = join_factors(r.cofactors, " x ");
                break;
            }
        }
        os << "| " << n << " | " << (cofactors.empty() ? "-" : cofactors) << " |";
        for (Engine e : engines) {
            const auto it = std::find_if(records.begin(), records.end(),
                                         [&](const auto& r) { return r.n == n && r.engine == e; });
            if (it == records.end())
                os << " - |";
            else if (!it->succeeded)
                os << " DNF (" << to_string(it->status) << ") |";
            else
                os << ' ' << detail::fixed(it->wall_time_s, 3) << " |";
        }
        os << '\n';
    }

    if (engines.size() >= 2) {
        const bool has_fft = std::find(engines.begin(), engines.end(), Engine::fft) != engines.end();
        const std::string reference(to_string(has_fft ? Engine::fft : engines.back()));
        os << "| **Speed-up** | (vs " << reference << ") |";
        try {
            const auto speedups = aggregate_speedup(speedup_rows(records, engines), reference);
            for (Engine e : engines) os << " **" << detail::fixed(speedups.at(std::string(to_string(e))), 1) << "** |";
        } catch (const InvalidInput&) {
            for (std::size_t i = 0; i < engines.size(); ++i) os << " - |";
        }
        os << '\n';
    }
    return os.str();
}

inline std::string emit_report(const std::vector<BenchRecord>& records, ReportFormat format) {
    switch (format) {
    case ReportFormat::csv: return emit_csv(records);
    case ReportFormat::json: return emit_json(records);
    case ReportFormat::markdown: return emit_markdown(records);
    }
    throw InvalidInput("emit_report: unknown format");
}

/// One attempt as a structured line for verbose tracing.
inline nlohmann::json to_json(const AttemptTrace& t) {
    nlohmann::json j{{"target", t.target}, {"x", t.x}, {"q", t.q}, {"outcome", describe(t.outcome)}};
    j["k"] = t.k ? nlohmann::json(*t.k) : nlohmann::json(nullptr);
    j["m"] = t.m ? nlohmann::json(*t.m) : nlohmann::json(nullptr);
    if (t.candidate) {
        j["period"] = t.candidate->period;
        j["convergent"] = {t.candidate->source.numerator, t.candidate->source.denominator};
        j["multiplier"] = t.candidate->multiplier;
    }
    nlohmann::json times = nlohmann::json::object();
    for (Phase p : kAllPhases) times[std::string(to_string(p))] = t.times[p];
    j["phase_times_s"] = times;
    return j;
}

} // namespace shorsim
