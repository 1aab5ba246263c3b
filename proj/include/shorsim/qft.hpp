#pragma once

// Quantum Fourier transform engines over a part-1 amplitude vector of length
// q = 2^w. All engines compute the same unitary map
//
//     out[k] = 1/sqrt(q) * sum_j exp(+2 pi i j k / q) * in[j]
//
// dense_dft   one output per "thread", outputs grouped in blocks handed to workers
// tiled_dft   same, with the input range split into tiles and partial sums reduced after
// fft_dft     iterative radix-2 transform
// circuit_qft Hadamard + controlled-phase gate network followed by a bit reversal

#include "shorsim/error.hpp"
#include "shorsim/numtheory.hpp"
#include "shorsim/qstate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace shorsim {

inline constexpr unsigned kDefaultCircuitWidth = 12;
inline constexpr u64 kDefaultBlockSize = 256;

/// roots[j] = exp(+2 pi i j / q). Immutable once built.
class TwiddleTable {
public:
    TwiddleTable() = default;

    explicit TwiddleTable(u64 q, unsigned max_width = kDefaultMaxWidth) : q_(q) {
        if (q < 2) throw InvalidInput("twiddle table: q must be >= 2");
        if (log2_exact(q) > max_width) {
            throw ResourceLimit("twiddle table of size " + std::to_string(q) + " exceeds the width limit");
        }
        roots_.resize(q);
        if (q == 2) {
            roots_[0] = {1.0, 0.0};
            roots_[1] = {-1.0, 0.0};
            return;
        }
        // Fill one quadrant and rotate by i, -1, -i so the axis points are exact.
        const u64 quarter = q / 4;
        const double step = 2.0 * std::numbers::pi / static_cast<double>(q);
        for (u64 j = 0; j < quarter; ++j) {
            const double c = std::cos(step * static_cast<double>(j));
            const double s = std::sin(step * static_cast<double>(j));
            roots_[j] = {c, s};
            roots_[j + quarter] = {-s, c};
            roots_[j + 2 * quarter] = {-c, -s};
            roots_[j + 3 * quarter] = {s, -c};
        }
    }

    u64 size() const { return q_; }
    const Amplitude& operator[](u64 j) const { return roots_[j]; }
    std::span<const Amplitude> roots() const { return roots_; }

private:
    u64 q_ = 0;
    std::vector<Amplitude> roots_;
};

inline TwiddleTable build_twiddles(u64 q, unsigned max_width = kDefaultMaxWidth) {
    return TwiddleTable(q, max_width);
}

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct KernelPlan {
    u64 block_size = kDefaultBlockSize;
    u64 tiles = 1;
    unsigned workers = default_workers();

    /// Clamps the block size to q and validates the plan against it.
    KernelPlan resolved(u64 q) const {
        KernelPlan p = *this;
        if (p.block_size == 0) throw InvalidInput("kernel plan: block_size must be positive");
        if (p.workers == 0) throw InvalidInput("kernel plan: workers must be >= 1");
        if (p.tiles == 0) throw InvalidInput("kernel plan: tiles must be >= 1");
        p.block_size = std::min(p.block_size, q);
        if (q % p.block_size != 0) throw InvalidInput("kernel plan: block_size must divide q");
        if (q % p.tiles != 0) throw InvalidInput("kernel plan: tiles must divide q");
        return p;
    }

    u64 num_blocks(u64 q) const { return q / std::min(block_size, q); }

    friend bool operator==(const KernelPlan&, const KernelPlan&) = default;
};

namespace detail {

// Runs body(i) for i in [0, count) on up to `workers` threads. Items are
// claimed from a shared counter so each is processed exactly once.
template <class Body>
void parallel_for(u64 count, unsigned workers, Body&& body) {
    const unsigned n_threads = static_cast<unsigned>(std::min<u64>(std::max(1u, workers), count));
    if (n_threads <= 1) {
        for (u64 i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<u64> next{0};
    auto run = [&] {
        for (u64 i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    };
    std::vector<std::jthread> pool;
    pool.reserve(n_threads - 1);
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(run);
    run();
}

// sum_{j in [begin, end)} roots[(j*k) mod q] * in[j], ascending j.
inline Amplitude row_sum(const double* in, const double* roots, u64 mask, u64 k, u64 begin, u64 end) {
    double re = 0.0, im = 0.0;
    u64 idx = (begin * k) & mask;
    for (u64 j = begin; j < end; ++j) {
        const double wr = roots[2 * idx], wi = roots[2 * idx + 1];
        const double vr = in[2 * j], vi = in[2 * j + 1];
        re += wr * vr - wi * vi;
        im += wr * vi + wi * vr;
        idx = (idx + k) & mask;
    }
    return {re, im};
}

inline void check_input(std::span<const Amplitude> state, const TwiddleTable& tw) {
    if (state.size() != tw.size()) {
        throw InvalidInput("transform: state length " + std::to_string(state.size()) +
                           " does not match twiddle table size " + std::to_string(tw.size()));
    }
}

inline const double* as_doubles(std::span<const Amplitude> v) { return reinterpret_cast<const double*>(v.data()); }

} // namespace detail

/// Dense on-the-fly transform: each output is one full row sum. Outputs are
/// grouped into blocks of plan.block_size and the blocks spread over workers.
/// The result is bitwise independent of the worker count.
inline std::vector<Amplitude> dense_dft(std::span<const Amplitude> state, const TwiddleTable& tw,
                                        const KernelPlan& plan = {}) {
    detail::check_input(state, tw);
    const u64 q = tw.size();
    const KernelPlan p = plan.resolved(q);
    if (p.tiles != 1) throw InvalidInput("dense_dft: plan is tiled; use tiled_dft");

    std::vector<Amplitude> out(q);
    const double* in = detail::as_doubles(state);
    const double* roots = detail::as_doubles(tw.roots());
    const double norm = 1.0 / std::sqrt(static_cast<double>(q));
    const u64 mask = q - 1;

    detail::parallel_for(p.num_blocks(q), p.workers, [&](u64 block) {
        const u64 first = block * p.block_size;
        for (u64 k = first; k < first + p.block_size; ++k) {
            out[k] = detail::row_sum(in, roots, mask, k, 0, q) * norm;
        }
    });
    return out;
}

/// Partial sums for the tiled kernel: one row per output, one column per tile.
class PartialSumBuffer {
public:
    PartialSumBuffer(u64 outputs, u64 tiles) : tiles_(tiles), cells_(outputs * tiles) {}

    Amplitude& at(u64 output, u64 tile) { return cells_[output * tiles_ + tile]; }
    const Amplitude& at(u64 output, u64 tile) const { return cells_[output * tiles_ + tile]; }
    u64 tiles() const { return tiles_; }

    /// Sum of one output's partials in ascending tile order.
    Amplitude reduce(u64 output) const {
        Amplitude s{0.0, 0.0};
        for (u64 t = 0; t < tiles_; ++t) s += at(output, t);
        return s;
    }

private:
    u64 tiles_;
    std::vector<Amplitude> cells_;
};

/// Tiled transform: work items are (output block, input tile) pairs, each
/// writing its own column of the partial-sum buffer; a single reduction pass
/// then folds the tiles together.
inline std::vector<Amplitude> tiled_dft(std::span<const Amplitude> state, const TwiddleTable& tw,
                                        const KernelPlan& plan) {
    detail::check_input(state, tw);
    if (plan.tiles < 2) throw InvalidInput("tiled_dft: tiles must be >= 2 (use dense_dft for an untiled plan)");
    const u64 q = tw.size();
    const KernelPlan p = plan.resolved(q);

    const double* in = detail::as_doubles(state);
    const double* roots = detail::as_doubles(tw.roots());
    const u64 mask = q - 1;
    const u64 tile_len = q / p.tiles;
    const u64 blocks = p.num_blocks(q);

    PartialSumBuffer partials(q, p.tiles);
    detail::parallel_for(blocks * p.tiles, p.workers, [&](u64 item) {
        const u64 block = item / p.tiles;
        const u64 tile = item % p.tiles;
        const u64 first = block * p.block_size;
        for (u64 k = first; k < first + p.block_size; ++k) {
            partials.at(k, tile) = detail::row_sum(in, roots, mask, k, tile * tile_len, (tile + 1) * tile_len);
        }
    });

    std::vector<Amplitude> out(q);
    const double norm = 1.0 / std::sqrt(static_cast<double>(q));
    for (u64 k = 0; k < q; ++k) out[k] = partials.reduce(k) * norm;
    return out;
}

/// out[rev_w(a)] = in[a], in place.
inline void bit_reverse_permute(std::span<Amplitude> state) {
    const unsigned w = log2_exact(state.size());
    for (u64 a = 0; a < state.size(); ++a) {
        u64 r = 0;
        for (unsigned b = 0; b < w; ++b) r |= ((a >> b) & 1u) << (w - 1 - b);
        if (a < r) std::swap(state[a], state[r]);
    }
}

/// Radix-2 decimation-in-time transform with the +i sign and 1/sqrt(q) scaling.
inline std::vector<Amplitude> fft_dft(std::span<const Amplitude> state, const TwiddleTable& tw) {
    detail::check_input(state, tw);
    const u64 q = tw.size();
    std::vector<Amplitude> a(state.begin(), state.end());
    bit_reverse_permute(a);
    for (u64 len = 2; len <= q; len <<= 1) {
        const u64 half = len / 2;
        const u64 stride = q / len;
        for (u64 start = 0; start < q; start += len) {
            for (u64 i = 0; i < half; ++i) {
                const Amplitude t = tw[i * stride] * a[start + i + half];
                const Amplitude u = a[start + i];
                a[start + i] = u + t;
                a[start + i + half] = u - t;
            }
        }
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(q));
    for (auto& v : a) v *= norm;
    return a;
}

inline std::vector<Amplitude> fft_dft(std::span<const Amplitude> state) {
    return fft_dft(state, TwiddleTable(state.size(), 63));
}

inline void apply_hadamard(std::span<Amplitude> state, unsigned qubit) {
    const unsigned w = log2_exact(state.size());
    if (qubit >= w) throw InvalidInput("apply_hadamard: qubit index out of range");
    const u64 bit = u64{1} << qubit;
    const double s = std::numbers::sqrt2 / 2.0;
    for (u64 i = 0; i < state.size(); ++i) {
        if (i & bit) continue;
        const Amplitude u = state[i], v = state[i | bit];
        state[i] = (u + v) * s;
        state[i | bit] = (u - v) * s;
    }
}

/// Multiplies every amplitude whose index has both bits set by exp(+i angle).
inline void apply_controlled_phase(std::span<Amplitude> state, unsigned control, unsigned target, double angle) {
    const unsigned w = log2_exact(state.size());
    if (control == target) throw InvalidInput("apply_controlled_phase: control and target must differ");
    if (control >= w || target >= w) throw InvalidInput("apply_controlled_phase: qubit index out of range");
    const u64 mask = (u64{1} << control) | (u64{1} << target);
    const Amplitude phase = std::polar(1.0, angle);
    for (u64 i = 0; i < state.size(); ++i) {
        if ((i & mask) == mask) state[i] *= phase;
    }
}

/// Gate-level QFT: for each qubit from the most significant down, a Hadamard
/// followed by controlled phases 2 pi / 2^k from every less significant qubit,
/// then a bit reversal.
inline std::vector<Amplitude> circuit_qft(std::span<const Amplitude> state,
                                          unsigned max_width = kDefaultCircuitWidth) {
    const unsigned w = log2_exact(state.size());
    if (w == 0) throw InvalidInput("circuit_qft: need at least one qubit");
    if (w > max_width) {
        throw ResourceLimit("circuit_qft: width " + std::to_string(w) + " exceeds the circuit limit of " +
                            std::to_string(max_width));
    }
    std::vector<Amplitude> a(state.begin(), state.end());
    for (unsigned t = w; t-- > 0;) {
        apply_hadamard(a, t);
        for (unsigned c = t; c-- > 0;) {
            const unsigned k = t - c + 1;
            apply_controlled_phase(a, c, t, 2.0 * std::numbers::pi / static_cast<double>(u64{1} << k));
        }
    }
    bit_reverse_permute(a);
    return a;
}

enum class Engine { dense, tiled, fft, circuit };

inline std::string_view to_string(Engine e) {
    switch (e) {
    case Engine::dense: return "dense";
    case Engine::tiled: return "tiled";
    case Engine::fft: return "fft";
    case Engine::circuit: return "circuit";
    }
    return "?";
}

inline std::optional<Engine> engine_from_string(std::string_view s) {
    for (auto e : {Engine::dense, Engine::tiled, Engine::fft, Engine::circuit}) {
        if (to_string(e) == s) return e;
    }
    return std::nullopt;
}

struct TransformOptions {
    KernelPlan plan;
    unsigned circuit_width = kDefaultCircuitWidth;
};

inline std::vector<Amplitude> apply_qft(Engine engine, std::span<const Amplitude> state, const TwiddleTable& tw,
                                        const TransformOptions& opt = {}) {
    switch (engine) {
    case Engine::dense: {
        KernelPlan p = opt.plan;
        p.tiles = 1;
        return dense_dft(state, tw, p);
    }
    case Engine::tiled: return tiled_dft(state, tw, opt.plan);
    case Engine::fft: return fft_dft(state, tw);
    case Engine::circuit: return circuit_qft(state, opt.circuit_width);
    }
    throw InvalidInput("apply_qft: unknown engine");
}

} // namespace shorsim
