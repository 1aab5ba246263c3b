#pragma once

// Classical integer side of Shor's algorithm: modular arithmetic, register
// sizing, continued-fraction period recovery and factor derivation.
// Everything here is a pure function on 64-bit unsigned integers.

#include "shorsim/error.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace shorsim {

using u64 = std::uint64_t;

inline constexpr unsigned kDefaultMaxWidth = 22;
inline constexpr u64 kDefaultMultiplierCap = 8;

struct RegisterWidth {
    u64 q = 0;
    unsigned w = 0;

    friend bool operator==(const RegisterWidth&, const RegisterWidth&) = default;
};

struct Convergent {
    u64 numerator = 0;
    u64 denominator = 1;

    friend bool operator==(const Convergent&, const Convergent&) = default;
};

/// A verified period. `unreduced` is the candidate `multiplier * source.denominator`
/// that first satisfied x^p = 1; `period` divides it and is the exact order.
struct PeriodCandidate {
    u64 period = 0;
    Convergent source;
    u64 multiplier = 1;
    u64 unreduced = 0;

    friend bool operator==(const PeriodCandidate&, const PeriodCandidate&) = default;
};

enum class RetryReason { odd_period, trivial_root, zero_measurement, bad_candidate };

inline std::string_view to_string(RetryReason r) {
    switch (r) {
    case RetryReason::odd_period: return "odd_period";
    case RetryReason::trivial_root: return "trivial_root";
    case RetryReason::zero_measurement: return "zero_measurement";
    case RetryReason::bad_candidate: return "bad_candidate";
    }
    return "unknown";
}

inline std::optional<RetryReason> retry_reason_from_string(std::string_view s) {
    for (auto r : {RetryReason::odd_period, RetryReason::trivial_root, RetryReason::zero_measurement,
                   RetryReason::bad_candidate}) {
        if (to_string(r) == s) return r;
    }
    return std::nullopt;
}

/// Result of one classical post-processing step.
struct FactorOutcome {
    enum class Kind { factors, retry, classical_shortcut };

    Kind kind = Kind::retry;
    u64 first = 0;  // smaller factor, or the shortcut divisor
    u64 second = 0; // larger factor (factors only)
    RetryReason reason = RetryReason::bad_candidate;

    static FactorOutcome factors(u64 a, u64 b) {
        return {Kind::factors, std::min(a, b), std::max(a, b), RetryReason::bad_candidate};
    }
    static FactorOutcome retry(RetryReason r) { return {Kind::retry, 0, 0, r}; }
    static FactorOutcome shortcut(u64 g) { return {Kind::classical_shortcut, g, 0, RetryReason::bad_candidate}; }

    bool is_factors() const { return kind == Kind::factors; }
    bool is_retry() const { return kind == Kind::retry; }
    bool is_shortcut() const { return kind == Kind::classical_shortcut; }

    friend bool operator==(const FactorOutcome& a, const FactorOutcome& b) {
        if (a.kind != b.kind) return false;
        switch (a.kind) {
        case Kind::factors: return a.first == b.first && a.second == b.second;
        case Kind::retry: return a.reason == b.reason;
        case Kind::classical_shortcut: return a.first == b.first;
        }
        return false;
    }
};

inline std::string describe(const FactorOutcome& o) {
    switch (o.kind) {
    case FactorOutcome::Kind::factors:
        return "factors(" + std::to_string(o.first) + "," + std::to_string(o.second) + ")";
    case FactorOutcome::Kind::retry: return "retry(" + std::string(to_string(o.reason)) + ")";
    case FactorOutcome::Kind::classical_shortcut: return "classical_shortcut(" + std::to_string(o.first) + ")";
    }
    return "?";
}

inline u64 gcd(u64 a, u64 b) {
    if (a == 0 && b == 0) throw InvalidInput("gcd: both arguments are zero");
    return std::gcd(a, b);
}

inline u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

/// base^exp mod modulus by right-to-left square-and-multiply.
inline u64 modpow(u64 base, u64 exp, u64 modulus) {
    if (modulus < 2) throw InvalidInput("modpow: modulus must be >= 2");
    u64 result = 1;
    base %= modulus;
    while (exp != 0) {
        if (exp & 1u) result = mulmod(result, base, modulus);
        base = mulmod(base, base, modulus);
        exp >>= 1;
    }
    return result;
}

/// Deterministic Miller-Rabin; the base set is exact for all 64-bit inputs.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1u) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        u64 x = modpow(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

namespace detail {

// Returns b with b^k == n, if one exists.
inline std::optional<u64> exact_root(u64 n, unsigned k) {
    u64 lo = 1;
    u64 hi = u64{1} << ((64 + k - 1) / k);
    auto cmp_pow = [&](u64 b) {
        // -1: b^k < n, 0: equal, 1: greater
        unsigned __int128 acc = 1;
        for (unsigned i = 0; i < k; ++i) {
            acc *= b;
            if (acc > n) return 1;
        }
        return acc == n ? 0 : -1;
    };
    while (lo <= hi) {
        u64 mid = lo + (hi - lo) / 2;
        int c = cmp_pow(mid);
        if (c == 0) return mid;
        if (c < 0)
            lo = mid + 1;
        else
            hi = mid - 1;
    }
    return std::nullopt;
}

inline std::vector<u64> distinct_prime_factors(u64 v) {
    std::vector<u64> out;
    for (u64 f = 2; f * f <= v; ++f) {
        if (v % f == 0) {
            out.push_back(f);
            while (v % f == 0) v /= f;
        }
    }
    if (v > 1) out.push_back(v);
    return out;
}

} // namespace detail

/// If n = b^k for some k >= 2, the smallest such b.
inline std::optional<u64> perfect_power_base(u64 n) {
    if (n < 4) return std::nullopt;
    const unsigned max_k = static_cast<unsigned>(std::bit_width(n) - 1);
    for (unsigned k = max_k; k >= 2; --k) {
        if (auto b = detail::exact_root(n, k); b && *b > 1) return b;
    }
    return std::nullopt;
}

/// Guards that Shor's reduction assumes. Returns a shortcut divisor for even
/// inputs and perfect powers, nothing for inputs that need the quantum path.
/// Throws NothingToFactor for primes.
inline std::optional<FactorOutcome> pre_checks(u64 n) {
    if (n < 2) throw InvalidInput("pre_checks: n must be >= 2");
    if (is_prime(n)) throw NothingToFactor(std::to_string(n) + " is prime; nothing to factor");
    if (n % 2 == 0) return FactorOutcome::shortcut(2);
    if (auto b = perfect_power_base(n)) return FactorOutcome::shortcut(*b);
    return std::nullopt;
}

/// The power of two q with n^2 <= q < 2 n^2.
inline RegisterWidth choose_register_width(u64 n, unsigned max_width = kDefaultMaxWidth) {
    if (n < 3) throw InvalidInput("choose_register_width: n must be >= 3");
    const unsigned __int128 n2 = static_cast<unsigned __int128>(n) * n;
    unsigned w = 0;
    while ((static_cast<unsigned __int128>(1) << w) < n2) {
        ++w;
        if (w > max_width) {
            throw ResourceLimit("register width for n=" + std::to_string(n) + " exceeds the " +
                                std::to_string(max_width) + "-qubit limit");
        }
    }
    return {u64{1} << w, w};
}

/// Brute-force multiplicative order of x modulo n.
inline u64 classical_period(u64 x, u64 n) {
    if (n < 2 || x <= 1 || x >= n) throw InvalidInput("classical_period: need 1 < x < n");
    if (std::gcd(x, n) != 1) throw InvalidInput("classical_period: x and n are not coprime");
    u64 v = x;
    for (u64 p = 1; p <= n; ++p) {
        if (v == 1) return p;
        v = mulmod(v, x, n);
    }
    throw InvalidInput("classical_period: no period found");
}

/// Continued-fraction convergents of m/q, in order of appearance.
inline std::vector<Convergent> convergents(u64 m, u64 q) {
    if (q == 0) throw InvalidInput("convergents: q must be positive");
    if (m >= q) throw InvalidInput("convergents: m must be < q");
    std::vector<Convergent> out;
    if (m == 0) return out;

    unsigned __int128 h_prev = 1, h_prev2 = 0;
    unsigned __int128 k_prev = 0, k_prev2 = 1;
    u64 num = m, den = q;
    while (den != 0) {
        const u64 a = num / den;
        const u64 r = num % den;
        const unsigned __int128 h = a * h_prev + h_prev2;
        const unsigned __int128 k = a * k_prev + k_prev2;
        out.push_back({static_cast<u64>(h), static_cast<u64>(k)});
        h_prev2 = h_prev;
        h_prev = h;
        k_prev2 = k_prev;
        k_prev = k;
        num = den;
        den = r;
    }
    return out;
}

using PeriodExtraction = std::variant<PeriodCandidate, RetryReason>;

/// Recovers the order of x mod n from a part-1 measurement m of a q-sized register.
/// Candidates are k*d for convergent denominators d <= n and k <= multiplier_cap;
/// the smallest one with x^p = 1 is then reduced to the exact order.
inline PeriodExtraction extract_period(u64 m, u64 q, u64 n, u64 x, u64 multiplier_cap = kDefaultMultiplierCap) {
    if (m >= q) throw InvalidInput("extract_period: m must be < q");
    if (n < 2) throw InvalidInput("extract_period: n must be >= 2");
    if (m == 0) return RetryReason::zero_measurement;

    std::optional<PeriodCandidate> best;
    for (const auto& c : convergents(m, q)) {
        if (c.denominator > n) break;
        for (u64 k = 1; k <= multiplier_cap; ++k) {
            const u64 p = k * c.denominator;
            if (p > n) break;
            if (best && (p > best->unreduced || (p == best->unreduced && k >= best->multiplier))) continue;
            if (modpow(x, p, n) == 1) best = PeriodCandidate{p, c, k, p};
        }
    }
    if (!best) return RetryReason::bad_candidate;

    u64 p = best->unreduced;
    for (u64 f : detail::distinct_prime_factors(p)) {
        while (p % f == 0 && modpow(x, p / f, n) == 1) p /= f;
    }
    best->period = p;
    return *best;
}

/// Turns a verified period into a factor pair, or says why it cannot.
inline FactorOutcome derive_factors(u64 n, u64 x, u64 p) {
    if (n < 3 || p == 0) throw InvalidInput("derive_factors: need n >= 3 and p >= 1");
    if (modpow(x, p, n) != 1) throw InvalidInput("derive_factors: x^p is not 1 mod n");
    if (p % 2 != 0) return FactorOutcome::retry(RetryReason::odd_period);
    const u64 y = modpow(x, p / 2, n);
    if (y == n - 1) return FactorOutcome::retry(RetryReason::trivial_root);
    for (u64 g : {std::gcd(y + n - 1, n), std::gcd(y + 1, n)}) {
        if (g > 1 && g < n) return FactorOutcome::factors(g, n / g);
    }
    return FactorOutcome::retry(RetryReason::bad_candidate);
}

} // namespace shorsim
