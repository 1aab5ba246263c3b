#pragma once

// Binary dump of a part-1 amplitude vector:
//
//   offset 0   "QREG"
//   offset 4   u32 version (1)
//   offset 8   u32 w, q = 2^w
//   offset 12  u32 reserved (0)
//   offset 16  q pairs of f64 (re, im)
//
// All integers and doubles are little-endian.

#include "shorsim/error.hpp"
#include "shorsim/qstate.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace shorsim {

inline constexpr std::uint32_t kStateDumpVersion = 1;

struct StateDump {
    unsigned w = 0;
    std::vector<Amplitude> amplitudes;
};

namespace detail {

inline void put_le(std::ostream& os, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint64_t get_le(std::istream& is, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) throw InvalidInput("state dump: truncated file");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}

} // namespace detail

inline void write_state_dump(std::ostream& os, std::span<const Amplitude> amps) {
    const unsigned w = log2_exact(amps.size());
    os.write("QREG", 4);
    detail::put_le(os, kStateDumpVersion, 4);
    detail::put_le(os, w, 4);
    detail::put_le(os, 0, 4);
    for (const auto& a : amps) {
        detail::put_le(os, std::bit_cast<std::uint64_t>(a.real()), 8);
        detail::put_le(os, std::bit_cast<std::uint64_t>(a.imag()), 8);
    }
}

inline void write_state_dump(const std::string& path, std::span<const Amplitude> amps) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("state dump: cannot open " + path + " for writing");
    write_state_dump(os, amps);
}

inline StateDump read_state_dump(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), 4) || std::memcmp(magic.data(), "QREG", 4) != 0) {
        throw InvalidInput("state dump: bad magic");
    }
    const auto version = detail::get_le(is, 4);
    if (version != kStateDumpVersion) throw InvalidInput("state dump: unsupported version " + std::to_string(version));
    StateDump d;
    d.w = static_cast<unsigned>(detail::get_le(is, 4));
    detail::get_le(is, 4);
    if (d.w > 40) throw InvalidInput("state dump: implausible width");
    d.amplitudes.resize(u64{1} << d.w);
    for (auto& a : d.amplitudes) {
        const double re = std::bit_cast<double>(detail::get_le(is, 8));
        const double im = std::bit_cast<double>(detail::get_le(is, 8));
        a = {re, im};
    }
    return d;
}

inline StateDump read_state_dump(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("state dump: cannot open " + path);
    return read_state_dump(is);
}

} // namespace shorsim
