#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace shorsim {

/// Anything that yields uniform doubles in [0, 1).
template <class S>
concept UniformSource = requires(S& s) {
    { s.next() } -> std::convertible_to<double>;
};

/// Deterministic source seeded from a 64-bit value. The double conversion uses
/// the top 53 bits directly so the stream does not depend on the standard
/// library's distribution implementation.
class SeededSampler {
public:
    explicit SeededSampler(std::uint64_t seed) : engine_(seed) {}

    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi].
    std::uint64_t next_in(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;
        return lo + static_cast<std::uint64_t>(next() * static_cast<double>(span)) % span;
    }

private:
    std::mt19937_64 engine_;
};

/// Replays a fixed list of draws; used to force measurement outcomes.
class ScriptedSampler {
public:
    explicit ScriptedSampler(std::vector<double> draws) : draws_(std::move(draws)) {}

    double next() {
        if (pos_ >= draws_.size()) throw std::out_of_range("ScriptedSampler: script exhausted");
        return draws_[pos_++];
    }

    std::size_t consumed() const { return pos_; }

private:
    std::vector<double> draws_;
    std::size_t pos_ = 0;
};

/// splitmix64 finalizer; derives independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace shorsim
