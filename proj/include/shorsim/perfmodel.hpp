#pragma once

// Cost model for the dense transform kernel: bytes moved when the full QFT
// matrix is shipped to a device, transfer time over a given bandwidth, peak
// throughput from core counts and clocks, arithmetic intensity, and the
// speedup aggregation used to compare implementations over a benchmark suite.

#include "shorsim/error.hpp"
#include "shorsim/numtheory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace shorsim {

inline constexpr double kGiB = 1073741824.0; // bandwidth figures are binary gigabytes

struct MachineSpec {
    std::string name;
    u64 cores = 1;
    u64 shaders_per_core = 1;
    double clock_ghz = 1.0;
    double fma_factor = 1.0;
    double simd_lanes = 1.0;
    double bandwidth_gib_s = 1.0;
    double power_w = 1.0;

    void validate() const {
        if (cores == 0 || shaders_per_core == 0 || !(clock_ghz > 0) || !(fma_factor > 0) || !(simd_lanes > 0) ||
            !(bandwidth_gib_s > 0) || !(power_w > 0)) {
            throw InvalidInput("machine spec '" + name + "': all quantities must be positive");
        }
    }

    friend bool operator==(const MachineSpec&, const MachineSpec&) = default;
};

/// The three devices of the reference benchmark. FMA and SIMD factors are not
/// part of the published table; the values here are the usual ones for each
/// architecture.
inline std::vector<MachineSpec> bundled_machines() {
    return {
        {"i7-2760QM", 4, 1, 2.2, 2.0, 4.0, 21.3, 45.0},
        {"GTX285", 30, 8, 0.648, 2.0, 1.0, 159.0, 204.0},
        {"GTX970m", 10, 128, 0.924, 2.0, 1.0, 120.0, 81.0},
    };
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& s, std::string_view what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidInput("cannot parse " + std::string(what) + " from '" + s + "'");
    }
}

inline u64 parse_u64(const std::string& s, std::string_view what) {
    u64 v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InvalidInput("cannot parse " + std::string(what) + " from '" + s + "'");
    }
    return v;
}

} // namespace detail

/// Flat key=value text; '#' starts a comment. Every key is required.
inline MachineSpec parse_machine_spec(std::istream& is) {
    MachineSpec spec;
    std::set<std::string> seen;
    std::string line;
    while (std::getline(is, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidInput("machine spec: expected key=value, got '" + line + "'");
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string val = detail::trim(std::string_view(line).substr(eq + 1));
        if (key == "name")
            spec.name = val;
        else if (key == "cores")
            spec.cores = detail::parse_u64(val, key);
        else if (key == "shaders_per_core")
            spec.shaders_per_core = detail::parse_u64(val, key);
        else if (key == "clock_ghz")
            spec.clock_ghz = detail::parse_double(val, key);
        else if (key == "fma_factor")
            spec.fma_factor = detail::parse_double(val, key);
        else if (key == "simd_lanes")
            spec.simd_lanes = detail::parse_double(val, key);
        else if (key == "bandwidth_gib_s")
            spec.bandwidth_gib_s = detail::parse_double(val, key);
        else if (key == "power_w")
            spec.power_w = detail::parse_double(val, key);
        else
            throw InvalidInput("machine spec: unknown key '" + key + "'");
        seen.insert(key);
    }
    for (const char* k : {"name", "cores", "shaders_per_core", "clock_ghz", "fma_factor", "simd_lanes",
                          "bandwidth_gib_s", "power_w"}) {
        if (!seen.count(k)) throw InvalidInput(std::string("machine spec: missing key '") + k + "'");
    }
    spec.validate();
    return spec;
}

inline MachineSpec load_machine_spec(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open machine spec " + path);
    return parse_machine_spec(is);
}

inline std::string format_machine_spec(const MachineSpec& s) {
    std::ostringstream os;
    os.precision(17);
    os << "name=" << s.name << "\ncores=" << s.cores << "\nshaders_per_core=" << s.shaders_per_core
       << "\nclock_ghz=" << s.clock_ghz << "\nfma_factor=" << s.fma_factor << "\nsimd_lanes=" << s.simd_lanes
       << "\nbandwidth_gib_s=" << s.bandwidth_gib_s << "\npower_w=" << s.power_w << "\n";
    return os.str();
}

/// Exact byte count; wide enough for h up to 31.
struct ByteCount {
    unsigned __int128 value = 0;

    double as_double() const { return static_cast<double>(value); }

    std::string str() const {
        if (value == 0) return "0";
        std::string s;
        for (auto v = value; v != 0; v /= 10) s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        return {s.rbegin(), s.rend()};
    }

    friend bool operator==(const ByteCount&, const ByteCount&) = default;
};

/// Bytes to move a 2^{2h} x 2^{2h} complex single-precision matrix plus the
/// input and output state vectors: (2 * 2^{2h} * 2^{2h} + 4 * 2^{2h}) * 4.
inline ByteCount transfer_bytes(unsigned h) {
    if (h < 1 || h > 31) throw InvalidInput("transfer_bytes: h must be in [1, 31]");
    using u128 = unsigned __int128;
    const u128 dim = u128{1} << (2 * h);
    // 2 * dim^2 * 4 = 2^{4h+3} fits for h <= 31; the vector term is far smaller.
    const u128 matrix = u128{1} << (4 * h + 3);
    return {matrix + 4 * dim * 4};
}

inline double transfer_time(ByteCount bytes, double bandwidth_gib_s) {
    if (!(bandwidth_gib_s > 0)) throw InvalidInput("transfer_time: bandwidth must be positive");
    return bytes.as_double() / (bandwidth_gib_s * kGiB);
}

/// Peak GFLOP/s: cores * shaders * clock * FMA * SIMD.
inline double theoretical_gflops(const MachineSpec& s) {
    return static_cast<double>(s.cores) * static_cast<double>(s.shaders_per_core) * s.clock_ghz * s.fma_factor *
           s.simd_lanes;
}

enum class ReuseModel { perfect, none };

/// Flops per byte of the dense kernel at size q. Each of the q^2 terms is a
/// complex multiply-add (8 real flops); amplitudes are 16 bytes.
inline double arithmetic_intensity(u64 q, ReuseModel reuse) {
    if (q < 2) throw InvalidInput("arithmetic_intensity: q must be >= 2");
    const double qd = static_cast<double>(q);
    const double flops = 8.0 * qd * qd;
    const double bytes = reuse == ReuseModel::perfect ? 16.0 * 2.0 * qd : 16.0 * (qd * qd + qd);
    return flops / bytes;
}

/// Flops per byte at which compute and bandwidth limits coincide.
inline double machine_balance(const MachineSpec& s) {
    return theoretical_gflops(s) * 1e9 / (s.bandwidth_gib_s * kGiB);
}

enum class Boundedness { compute_bound, memory_bound };

inline std::string_view to_string(Boundedness b) {
    return b == Boundedness::compute_bound ? "compute_bound" : "memory_bound";
}

inline Boundedness classify_boundedness(double intensity, const MachineSpec& s) {
    return intensity >= machine_balance(s) ? Boundedness::compute_bound : Boundedness::memory_bound;
}

/// One implementation's timings, keyed by target integer. Missing keys mean
/// no result was obtained for that target.
struct SpeedupRow {
    std::string label;
    std::map<u64, double> timings;

    std::set<u64> available() const {
        std::set<u64> s;
        for (const auto& [n, _] : timings) s.insert(n);
        return s;
    }

    friend bool operator==(const SpeedupRow&, const SpeedupRow&) = default;
};

/// Ratio of summed runtimes over the targets every row has data for.
inline std::map<std::string, double> aggregate_speedup(const std::vector<SpeedupRow>& rows,
                                                       std::string_view reference_label) {
    const auto ref = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.label == reference_label; });
    if (ref == rows.end()) throw InvalidInput("aggregate_speedup: reference '" + std::string(reference_label) + "' not found");

    std::set<u64> common = ref->available();
    for (const auto& r : rows) {
        std::set<u64> keep;
        for (u64 n : common) {
            if (r.timings.count(n)) keep.insert(n);
        }
        common = std::move(keep);
    }
    if (common.empty()) throw InvalidInput("aggregate_speedup: rows share no common targets");

    auto sum_over = [&](const SpeedupRow& r) {
        double s = 0.0;
        for (u64 n : common) s += r.timings.at(n);
        return s;
    };
    const double ref_sum = sum_over(*ref);
    if (!(ref_sum > 0)) throw InvalidInput("aggregate_speedup: reference timings sum to zero");

    std::map<std::string, double> out;
    for (const auto& r : rows) out[r.label] = r.label == ref->label ? 1.0 : sum_over(r) / ref_sum;
    return out;
}

/// Published timings (seconds) for the ten-integer factoring suite.
inline std::vector<SpeedupRow> table3_dataset() {
    return {
        {"Hayward", {{77, 111.462}, {143, 114.015}, {323, 1915.227}, {231, 459.258}, {255, 1812.330}}},
        {"Fast-Hayward",
         {{77, 3.205}, {143, 34.481}, {323, 462.850}, {231, 60.218}, {255, 115.955}, {399, 4846.131},
          {423, 5130.147}, {539, 11645.820}}},
        {"Liquid",
         {{77, 47.125}, {143, 189.523}, {323, 1171.650}, {231, 214.320}, {255, 195.579}, {399, 1126.509},
          {423, 1179.300}, {539, 6705.252}}},
        {"GTX285",
         {{77, 0.725}, {143, 3.236}, {323, 45.424}, {551, 716.100}, {589, 952.166}, {231, 11.857}, {255, 11.568},
          {399, 180.153}, {423, 180.485}, {539, 714.752}}},
        {"GTX970m",
         {{77, 1.167}, {143, 1.791}, {323, 21.375}, {231, 5.725}, {255, 5.833}, {399, 83.675}, {423, 85.140}}},
    };
}

/// Wide CSV: header "n,<label>,<label>...", one line per target, empty cell = no data.
inline std::vector<SpeedupRow> parse_speedup_csv(std::istream& is) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(detail::trim(cell));
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput("speedup csv: empty input");
    const auto header = split(line);
    if (header.size() < 2 || header[0] != "n") throw InvalidInput("speedup csv: header must start with 'n'");
    std::vector<SpeedupRow> rows;
    for (std::size_t i = 1; i < header.size(); ++i) rows.push_back({header[i], {}});
    while (std::getline(is, line)) {
        if (detail::trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() > header.size()) throw InvalidInput("speedup csv: too many cells in '" + line + "'");
        const u64 n = detail::parse_u64(cells[0], "n");
        for (std::size_t i = 1; i < cells.size(); ++i) {
            if (!cells[i].empty()) rows[i - 1].timings[n] = detail::parse_double(cells[i], header[i]);
        }
    }
    return rows;
}

inline std::vector<SpeedupRow> load_speedup_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open " + path);
    return parse_speedup_csv(is);
}

} // namespace shorsim
