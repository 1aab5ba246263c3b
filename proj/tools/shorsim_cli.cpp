// shorsim: command-line front end.
//
//   shorsim factor --n 77 --kernel dense
//   shorsim bench --suite table3-full --engines fft --format markdown
//   shorsim model --transfer 7 8 9 10 --speedup data/table3_timings.csv --reference GTX970m

#include "shorsim/shorsim.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;

struct PlanArgs {
    shorsim::u64 block_size = shorsim::kDefaultBlockSize;
    shorsim::u64 tiles = 1;
    unsigned workers = shorsim::default_workers();
};

void add_plan_options(CLI::App* cmd, PlanArgs& plan) {
    cmd->add_option("--block-size", plan.block_size, "Outputs per block")->check(CLI::PositiveNumber);
    cmd->add_option("--tiles", plan.tiles, "Input tiles for the tiled kernel")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", plan.workers, "Worker threads")->check(CLI::PositiveNumber);
}

shorsim::Engine parse_engine(const std::string& s) {
    const auto e = shorsim::engine_from_string(s);
    if (!e) throw shorsim::InvalidInput("unknown kernel '" + s + "'");
    return *e;
}

shorsim::KernelPlan make_plan(const PlanArgs& a, bool tiled) {
    shorsim::KernelPlan p;
    p.block_size = a.block_size;
    p.tiles = a.tiles;
    p.workers = a.workers;
    if (tiled && p.tiles == 1) p.tiles = 4;
    return p;
}

std::string attempt_line(std::size_t index, const shorsim::AttemptTrace& t) {
    std::ostringstream os;
    os << "attempt " << index << ": target=" << t.target << " x=" << t.x;
    if (t.q) os << " q=" << t.q;
    if (t.k) os << " k=" << *t.k;
    if (t.m) os << " m=" << *t.m;
    if (t.candidate) os << " p=" << t.candidate->period;
    os << " -> " << shorsim::describe(t.outcome);
    return os.str();
}

struct FactorArgs {
    shorsim::u64 n = 0;
    std::optional<shorsim::u64> base;
    shorsim::u64 seed = 1;
    std::string kernel = "dense";
    PlanArgs plan;
    shorsim::u64 max_attempts = 32;
    std::optional<double> time_budget;
    unsigned max_width = shorsim::kDefaultMaxWidth;
    std::string dump_state;
    bool verbose = false;
};

int run_factor(const FactorArgs& a) {
    shorsim::ShorConfig cfg;
    cfg.n = a.n;
    cfg.base_override = a.base;
    cfg.seed = a.seed;
    cfg.kernel = parse_engine(a.kernel);
    cfg.plan = make_plan(a.plan, cfg.kernel == shorsim::Engine::tiled);
    cfg.max_attempts = a.max_attempts;
    cfg.time_budget_s = a.time_budget;
    cfg.max_width = a.max_width;
    if (a.verbose) {
        cfg.on_attempt = [](const shorsim::AttemptTrace& t) { std::cerr << shorsim::to_json(t).dump() << '\n'; };
    }
    std::vector<shorsim::Amplitude> last_state;
    if (!a.dump_state.empty()) {
        cfg.on_transformed = [&](shorsim::u64, std::span<const shorsim::Amplitude> s) {
            last_state.assign(s.begin(), s.end());
        };
    }

    const shorsim::ShorResult r = shorsim::run_shor(cfg);
    for (std::size_t i = 0; i < r.attempts.size(); ++i) std::cout << attempt_line(i + 1, r.attempts[i]) << '\n';
    if (!a.dump_state.empty()) {
        if (last_state.empty()) {
            std::cerr << "no quantum attempt ran; state not dumped\n";
        } else {
            shorsim::write_state_dump(a.dump_state, last_state);
        }
    }
    if (!r.succeeded) {
        std::cout << a.n << ": not factored (" << shorsim::to_string(r.stop) << "); partial "
                  << shorsim::join_factors(r.factors, " x ") << '\n';
        return kExitFailed;
    }
    std::cout << a.n << " = " << shorsim::join_factors(r.factors, " x ") << '\n';
    if (a.verbose && !r.attempts.empty()) {
        const auto frac = shorsim::profile_phases(r);
        std::cerr << "phase fractions:";
        for (auto p : shorsim::kAllPhases) std::cerr << ' ' << shorsim::to_string(p) << '=' << frac[p];
        std::cerr << "\ntotal " << r.total_time << " s\n";
    }
    return kExitOk;
}

struct BenchArgs {
    std::string suite = "table3-small";
    std::vector<shorsim::u64> targets;
    std::vector<std::string> engines{"fft"};
    std::string output;
    std::string format = "csv";
    shorsim::u64 seed = 1;
    PlanArgs plan;
    shorsim::u64 max_attempts = 32;
    double time_budget = shorsim::kDefaultTargetBudgetS;
    bool parallel_targets = false;
};

int run_bench(const BenchArgs& a) {
    std::vector<shorsim::u64> targets;
    if (a.suite == "table3-small")
        targets = shorsim::table3_small_suite();
    else if (a.suite == "table3-full")
        targets = shorsim::table3_full_suite();
    else if (a.suite == "custom")
        targets = a.targets;
    else
        throw shorsim::InvalidInput("unknown suite '" + a.suite + "'");
    if (a.suite != "custom" && !a.targets.empty()) throw shorsim::InvalidInput("--targets requires --suite custom");

    const auto format = shorsim::report_format_from_string(a.format);
    shorsim::BenchOptions opt;
    opt.engines.clear();
    bool tiled = false;
    for (const auto& e : a.engines) {
        opt.engines.push_back(parse_engine(e));
        tiled = tiled || opt.engines.back() == shorsim::Engine::tiled;
    }
    opt.base.seed = a.seed;
    opt.base.plan = make_plan(a.plan, tiled);
    opt.base.max_attempts = a.max_attempts;
    opt.base.time_budget_s = a.time_budget;
    opt.parallel_targets = a.parallel_targets;

    const auto records = shorsim::run_benchmark_suite(targets, opt);
    const std::string report = shorsim::emit_report(records, format);
    if (a.output.empty()) {
        std::cout << report;
    } else {
        std::ofstream os(a.output, std::ios::binary);
        if (!os) throw shorsim::InvalidInput("cannot write " + a.output);
        os << report;
    }
    for (const auto& r : records) {
        if (!r.succeeded) return kExitFailed;
    }
    return kExitOk;
}

struct ModelArgs {
    std::vector<unsigned> transfer;
    std::vector<std::string> machines;
    std::string speedup_csv;
    std::string reference = "GTX970m";
    std::vector<std::string> rows;
    std::vector<shorsim::u64> intensity;
};

int run_model(const ModelArgs& a) {
    std::vector<shorsim::MachineSpec> machines;
    for (const auto& path : a.machines) machines.push_back(shorsim::load_machine_spec(path));
    if (machines.empty()) machines = shorsim::bundled_machines();

    std::cout.setf(std::ios::fixed);
    const bool nothing_requested = a.transfer.empty() && a.speedup_csv.empty() && a.intensity.empty();
    if (nothing_requested || !a.machines.empty()) {
        std::cout << "machine,peak_gflops,balance_flops_per_byte\n";
        for (const auto& m : machines) {
            std::cout.precision(2);
            std::cout << m.name << ',' << shorsim::theoretical_gflops(m) << ',';
            std::cout.precision(4);
            std::cout << shorsim::machine_balance(m) << '\n';
        }
    }
    if (!a.transfer.empty()) {
        std::cout << "h,bytes";
        for (const auto& m : machines) std::cout << ",T_" << m.name << "_s";
        std::cout << '\n';
        std::cout.precision(9);
        for (unsigned h : a.transfer) {
            const auto bytes = shorsim::transfer_bytes(h);
            std::cout << h << ',' << bytes.str();
            for (const auto& m : machines) std::cout << ',' << shorsim::transfer_time(bytes, m.bandwidth_gib_s);
            std::cout << '\n';
        }
    }
    if (!a.intensity.empty()) {
        std::cout << "q,intensity_perfect,intensity_none";
        for (const auto& m : machines) std::cout << ',' << m.name;
        std::cout << '\n';
        for (auto q : a.intensity) {
            const double perfect = shorsim::arithmetic_intensity(q, shorsim::ReuseModel::perfect);
            std::cout.precision(4);
            std::cout << q << ',' << perfect << ',' << shorsim::arithmetic_intensity(q, shorsim::ReuseModel::none);
            for (const auto& m : machines) std::cout << ',' << shorsim::to_string(shorsim::classify_boundedness(perfect, m));
            std::cout << '\n';
        }
    }
    if (!a.speedup_csv.empty()) {
        auto rows = shorsim::load_speedup_csv(a.speedup_csv);
        if (!a.rows.empty()) {
            std::vector<shorsim::SpeedupRow> picked;
            for (const auto& label : a.rows) {
                const auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.label == label; });
                if (it == rows.end()) throw shorsim::InvalidInput("no row labelled '" + label + "'");
                picked.push_back(*it);
            }
            rows = std::move(picked);
        }
        const auto speedups = shorsim::aggregate_speedup(rows, a.reference);
        std::cout << "label,speedup_vs_" << a.reference << '\n';
        std::cout.precision(4);
        for (const auto& r : rows) std::cout << r.label << ',' << speedups.at(r.label) << '\n';
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shor factoring simulator with a block-parallel dense QFT kernel"};
    app.require_subcommand(1);

    FactorArgs fa;
    auto* factor = app.add_subcommand("factor", "Factor one integer");
    factor->add_option("--n", fa.n, "Integer to factor")->required();
    factor->add_option("--base", fa.base, "Fixed base x (1 < x < n)");
    factor->add_option("--seed", fa.seed, "Random seed");
    factor->add_option("--kernel", fa.kernel, "QFT engine")
        ->check(CLI::IsMember({"dense", "tiled", "fft", "circuit"}));
    add_plan_options(factor, fa.plan);
    factor->add_option("--max-attempts", fa.max_attempts, "Attempts per split")->check(CLI::PositiveNumber);
    factor->add_option("--time-budget", fa.time_budget, "Wall-clock budget in seconds");
    factor->add_option("--max-width", fa.max_width, "Register width limit in qubits");
    factor->add_option("--dump-state", fa.dump_state, "Write the last post-transform state to this file");
    factor->add_flag("--verbose,-v", fa.verbose, "Emit attempt traces as JSON lines on stderr");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Run the factoring benchmark suite");
    bench->add_option("--suite", ba.suite, "table3-small, table3-full or custom")
        ->check(CLI::IsMember({"table3-small", "table3-full", "custom"}));
    bench->add_option("--targets", ba.targets, "Targets for --suite custom");
    bench->add_option("--engines", ba.engines, "Comma-separated engines")->delimiter(',');
    bench->add_option("--output", ba.output, "Report file (default stdout)");
    bench->add_option("--format", ba.format, "csv, json or markdown")
        ->check(CLI::IsMember({"csv", "json", "markdown"}));
    bench->add_option("--seed", ba.seed, "Random seed");
    add_plan_options(bench, ba.plan);
    bench->add_option("--max-attempts", ba.max_attempts, "Attempts per split")->check(CLI::PositiveNumber);
    bench->add_option("--time-budget", ba.time_budget, "Per-target budget in seconds");
    bench->add_flag("--parallel-targets", ba.parallel_targets, "Run targets concurrently");

    ModelArgs ma;
    auto* model = app.add_subcommand("model", "Cost model: transfer sizes, peak rates, speedups");
    model->add_option("--transfer", ma.transfer, "Half-widths h to tabulate")->check(CLI::Range(1, 31));
    model->add_option("--machine", ma.machines, "Machine spec file(s)");
    model->add_option("--intensity", ma.intensity, "Register sizes q for the intensity model");
    model->add_option("--speedup", ma.speedup_csv, "Timing CSV for speedup aggregation");
    model->add_option("--reference", ma.reference, "Reference row label");
    model->add_option("--rows", ma.rows, "Rows to compare (default all)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*factor) return run_factor(fa);
        if (*bench) return run_bench(ba);
        if (*model) return run_model(ma);
    } catch (const shorsim::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const shorsim::ResourceLimit& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}
