#pragma once

// The two-part register |r1, r2>. Part 1 is a dense amplitude vector over the
// exponent a; part 2 is stored as the deterministic residue x^a mod n for each
// a, which represents the entangled joint state exactly in Theta(q) memory.

#include "shorsim/error.hpp"
#include "shorsim/numtheory.hpp"
#include "shorsim/sampler.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace shorsim {

using Amplitude = std::complex<double>;

inline constexpr double kNormTolerance = 1e-9;

struct CompositeRegister {
    u64 q = 0;
    unsigned w = 0;
    std::vector<Amplitude> amplitudes;
    std::vector<u64> residues;
    u64 n = 0;
    u64 x = 0;
    std::optional<u64> collapsed_k;
};

inline bool is_power_of_two(u64 v) { return std::has_single_bit(v); }

inline unsigned log2_exact(u64 q) {
    if (!is_power_of_two(q)) throw InvalidInput("size " + std::to_string(q) + " is not a power of two");
    return static_cast<unsigned>(std::countr_zero(q));
}

inline double l2_norm_squared(std::span<const Amplitude> amps) {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return s;
}

inline double l2_norm(std::span<const Amplitude> amps) { return std::sqrt(l2_norm_squared(amps)); }
inline double l2_norm(const CompositeRegister& reg) { return l2_norm(reg.amplitudes); }

inline bool is_normalized(std::span<const Amplitude> amps, double tol = kNormTolerance) {
    return std::abs(l2_norm_squared(amps) - 1.0) <= tol;
}

/// Uniform superposition 1/sqrt(q) over a = 0..q-1 with part 2 cleared.
inline CompositeRegister init_uniform(u64 q) {
    if (q < 2) throw InvalidInput("init_uniform: q must be >= 2");
    CompositeRegister reg;
    reg.w = log2_exact(q);
    reg.q = q;
    reg.amplitudes.assign(q, Amplitude(1.0 / std::sqrt(static_cast<double>(q)), 0.0));
    reg.residues.assign(q, 0);
    return reg;
}

/// Writes x^a mod n into part 2 for every a, incrementally.
inline void entangle_modexp(CompositeRegister& reg, u64 x, u64 n) {
    if (n < 2) throw InvalidInput("entangle_modexp: n must be >= 2");
    if (x == 0 || std::gcd(x, n) != 1) throw InvalidInput("entangle_modexp: x must be coprime to n");
    if (reg.collapsed_k) throw InvalidInput("entangle_modexp: register already measured");
    reg.n = n;
    reg.x = x;
    u64 r = 1 % n;
    const u64 xr = x % n;
    for (u64 a = 0; a < reg.q; ++a) {
        reg.residues[a] = r;
        r = mulmod(r, xr, n);
    }
}

/// Probability of each part-2 outcome, indexed by residue value (length n).
inline std::vector<double> part2_distribution(const CompositeRegister& reg) {
    if (reg.n < 2) throw InvalidInput("part2_distribution: register is not entangled");
    std::vector<double> probs(reg.n, 0.0);
    for (u64 a = 0; a < reg.q; ++a) probs[reg.residues[a]] += std::norm(reg.amplitudes[a]);
    return probs;
}

namespace detail {

// Inverse CDF over a non-negative weight sequence. `u` in [0, 1).
template <class Weights>
std::size_t inverse_cdf(const Weights& weights, double u) {
    double total = 0.0;
    for (double v : weights) total += v;
    const double target = u * total;
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double v = weights[i];
        if (v <= 0.0) continue;
        last_positive = i;
        cum += v;
        if (cum > target) return i;
    }
    return last_positive;
}

} // namespace detail

/// Measures part 2 (Born rule over residue classes, ascending residue order),
/// collapses part 1 onto the matching exponents and renormalizes.
template <UniformSource S>
u64 measure_part2(CompositeRegister& reg, S& sampler) {
    if (reg.collapsed_k) throw InvalidInput("measure_part2: register already collapsed");
    if (!is_normalized(reg.amplitudes)) throw InvalidInput("measure_part2: register is not normalized");
    const auto probs = part2_distribution(reg);
    const u64 k = detail::inverse_cdf(probs, sampler.next());

    const double scale = 1.0 / std::sqrt(probs[k]);
    for (u64 a = 0; a < reg.q; ++a) {
        if (reg.residues[a] == k)
            reg.amplitudes[a] *= scale;
        else
            reg.amplitudes[a] = Amplitude(0.0, 0.0);
    }
    reg.collapsed_k = k;
    return k;
}

/// Draws index m with probability |amps[m]|^2 by a prefix scan.
template <UniformSource S>
u64 sample_index(std::span<const Amplitude> amps, S& sampler) {
    if (!is_normalized(amps)) throw InvalidInput("sample_part1: state is not normalized");
    std::vector<double> probs(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) probs[i] = std::norm(amps[i]);
    return detail::inverse_cdf(probs, sampler.next());
}

template <UniformSource S>
u64 sample_part1(const CompositeRegister& reg, S& sampler) {
    return sample_index(std::span<const Amplitude>(reg.amplitudes), sampler);
}

} // namespace shorsim
