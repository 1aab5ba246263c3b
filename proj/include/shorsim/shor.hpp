#pragma once

// End-to-end factoring driver: one attempt runs the full register pipeline,
// run_shor repeats attempts and splits cofactors recursively until every
// factor is prime.

#include "shorsim/error.hpp"
#include "shorsim/numtheory.hpp"
#include "shorsim/qft.hpp"
#include "shorsim/qstate.hpp"
#include "shorsim/sampler.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace shorsim {

enum class Phase { setup, entangle, measure2, qft, sample, postprocess };
inline constexpr std::size_t kPhaseCount = 6;
inline constexpr std::array<Phase, kPhaseCount> kAllPhases{Phase::setup,  Phase::entangle, Phase::measure2,
                                                           Phase::qft,    Phase::sample,   Phase::postprocess};

inline std::string_view to_string(Phase p) {
    switch (p) {
    case Phase::setup: return "setup";
    case Phase::entangle: return "entangle";
    case Phase::measure2: return "measure2";
    case Phase::qft: return "qft";
    case Phase::sample: return "sample";
    case Phase::postprocess: return "postprocess";
    }
    return "?";
}

/// Seconds (or fractions) per pipeline phase.
struct PhaseTimes {
    std::array<double, kPhaseCount> values{};

    double& operator[](Phase p) { return values[static_cast<std::size_t>(p)]; }
    double operator[](Phase p) const { return values[static_cast<std::size_t>(p)]; }
    double total() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }

    friend bool operator==(const PhaseTimes&, const PhaseTimes&) = default;
};

struct AttemptTrace {
    u64 target = 0; // the integer this attempt tried to split
    u64 x = 0;
    u64 q = 0;
    std::optional<u64> k;
    std::optional<u64> m;
    std::optional<PeriodCandidate> candidate;
    FactorOutcome outcome;
    PhaseTimes times;
};

enum class StopReason { none, attempts_exhausted, time_budget };

inline std::string_view to_string(StopReason r) {
    switch (r) {
    case StopReason::none: return "none";
    case StopReason::attempts_exhausted: return "attempts_exhausted";
    case StopReason::time_budget: return "time_budget";
    }
    return "?";
}

struct ShorConfig {
    u64 n = 0;
    std::optional<u64> base_override;
    u64 seed = 0;
    Engine kernel = Engine::dense;
    KernelPlan plan;
    unsigned circuit_width = kDefaultCircuitWidth;
    unsigned max_width = kDefaultMaxWidth;
    u64 max_attempts = 32;
    u64 multiplier_cap = kDefaultMultiplierCap;
    std::optional<double> time_budget_s;

    // Called after every attempt (verbose tracing).
    std::function<void(const AttemptTrace&)> on_attempt;
    // Called with the part-1 state right after the transform.
    std::function<void(u64 target, std::span<const Amplitude>)> on_transformed;
};

struct ShorResult {
    u64 n = 0;
    std::vector<u64> factors; // ascending; prime when succeeded
    std::vector<AttemptTrace> attempts;
    double total_time = 0.0;
    bool succeeded = false;
    StopReason stop = StopReason::none;
};

namespace detail {

class PhaseTimer {
public:
    explicit PhaseTimer(PhaseTimes& times) : times_(times), last_(clock::now()) {}

    void lap(Phase p) {
        const auto now = clock::now();
        times_[p] += std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }

private:
    using clock = std::chrono::steady_clock;
    PhaseTimes& times_;
    clock::time_point last_;
};

} // namespace detail

/// One pass of the pipeline against cfg.n. Algorithmic dead ends come back as
/// retry outcomes; only configuration and resource-guard problems throw.
template <UniformSource S>
AttemptTrace single_attempt(const ShorConfig& cfg, S& sampler) {
    const u64 n = cfg.n;
    if (n < 4) throw InvalidInput("single_attempt: n must be an odd composite");

    AttemptTrace t;
    t.target = n;
    detail::PhaseTimer timer(t.times);

    if (cfg.base_override) {
        t.x = *cfg.base_override;
        if (t.x <= 1 || t.x >= n) throw InvalidInput("base must satisfy 1 < x < n");
    } else {
        // uniform over [2, n-2]
        const u64 span = n - 3;
        t.x = 2 + std::min<u64>(static_cast<u64>(sampler.next() * static_cast<double>(span)), span - 1);
    }

    if (const u64 g = std::gcd(t.x, n); g > 1) {
        t.outcome = FactorOutcome::shortcut(g);
        timer.lap(Phase::setup);
        return t;
    }

    const RegisterWidth width = choose_register_width(n, cfg.max_width);
    t.q = width.q;
    CompositeRegister reg = init_uniform(width.q);
    timer.lap(Phase::setup);

    entangle_modexp(reg, t.x, n);
    timer.lap(Phase::entangle);

    t.k = measure_part2(reg, sampler);
    timer.lap(Phase::measure2);

    {
        TwiddleTable tw;
        if (cfg.kernel != Engine::circuit) tw = build_twiddles(width.q, cfg.max_width);
        reg.amplitudes = apply_qft(cfg.kernel, reg.amplitudes, tw, {cfg.plan, cfg.circuit_width});
    }
    timer.lap(Phase::qft);
    if (cfg.on_transformed) cfg.on_transformed(n, reg.amplitudes);

    t.m = sample_part1(reg, sampler);
    timer.lap(Phase::sample);

    const auto extraction = extract_period(*t.m, width.q, n, t.x, cfg.multiplier_cap);
    if (const auto* cand = std::get_if<PeriodCandidate>(&extraction)) {
        t.candidate = *cand;
        t.outcome = derive_factors(n, t.x, cand->period);
    } else {
        t.outcome = FactorOutcome::retry(std::get<RetryReason>(extraction));
    }
    timer.lap(Phase::postprocess);
    return t;
}

namespace detail {

class Factorizer {
public:
    explicit Factorizer(const ShorConfig& cfg, ShorResult& result)
        : cfg_(cfg), result_(result), start_(std::chrono::steady_clock::now()) {}

    bool split(u64 m, u64 seed, bool top_level) {
        if (is_prime(m)) {
            result_.factors.push_back(m);
            return true;
        }
        if (auto shortcut = pre_checks(m)) return split_pair(m, shortcut->first, seed);

        ShorConfig level = cfg_;
        level.n = m;
        if (!top_level) level.base_override.reset();
        SeededSampler sampler(seed);
        for (u64 attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
            if (out_of_time()) return stop(m, StopReason::time_budget);
            AttemptTrace t = single_attempt(level, sampler);
            if (cfg_.on_attempt) cfg_.on_attempt(t);
            const FactorOutcome outcome = t.outcome;
            result_.attempts.push_back(std::move(t));
            if (outcome.is_factors() || outcome.is_shortcut()) return split_pair(m, outcome.first, seed);
        }
        return stop(m, StopReason::attempts_exhausted);
    }

private:
    bool split_pair(u64 m, u64 f, u64 seed) {
        const bool a = split(f, mix_seed(seed, f), false);
        const bool b = split(m / f, mix_seed(seed, m / f), false);
        return a && b;
    }

    bool stop(u64 m, StopReason why) {
        result_.factors.push_back(m);
        if (result_.stop == StopReason::none) result_.stop = why;
        return false;
    }

    bool out_of_time() const {
        if (!cfg_.time_budget_s) return false;
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return elapsed >= *cfg_.time_budget_s;
    }

    const ShorConfig& cfg_;
    ShorResult& result_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

/// Factors cfg.n completely. Deterministic for a given configuration.
/// Throws NothingToFactor when n is prime.
inline ShorResult run_shor(const ShorConfig& cfg) {
    if (cfg.n < 3) throw InvalidInput("run_shor: n must be >= 3");
    if (cfg.max_attempts < 1) throw InvalidInput("run_shor: max_attempts must be >= 1");
    if (cfg.base_override && (*cfg.base_override <= 1 || *cfg.base_override >= cfg.n)) {
        throw InvalidInput("run_shor: base must satisfy 1 < x < n");
    }
    if (is_prime(cfg.n)) throw NothingToFactor(std::to_string(cfg.n) + " is prime; nothing to factor");

    ShorResult result;
    result.n = cfg.n;
    const auto start = std::chrono::steady_clock::now();
    detail::Factorizer f(cfg, result);
    result.succeeded = f.split(cfg.n, cfg.seed, true);
    std::sort(result.factors.begin(), result.factors.end());
    result.total_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

/// Share of summed attempt time spent in each phase.
inline PhaseTimes profile_phases(std::span<const AttemptTrace> attempts) {
    if (attempts.empty()) throw InvalidInput("profile_phases: no attempts recorded");
    PhaseTimes sum;
    for (const auto& a : attempts) {
        for (std::size_t i = 0; i < kPhaseCount; ++i) sum.values[i] += a.times.values[i];
    }
    const double total = sum.total();
    if (!(total > 0.0)) throw InvalidInput("profile_phases: recorded time is zero");
    for (double& v : sum.values) v /= total;
    return sum;
}

inline PhaseTimes profile_phases(const ShorResult& result) { return profile_phases(result.attempts); }

} // namespace shorsim
