#include "shorsim/bench.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace shorsim;

namespace {

BenchRecord sample_record(u64 n, Engine e, double wall, double qft) {
    BenchRecord r;
    r.n = n;
    r.cofactors = table3_cofactors().at(n);
    r.engine = e;
    r.plan.block_size = 256;
    r.plan.tiles = 1;
    r.plan.workers = 4;
    r.seed = 42;
    r.wall_time_s = wall;
    r.phase_fractions[Phase::qft] = qft;
    r.phase_fractions[Phase::setup] = 1.0 - qft;
    r.succeeded = true;
    r.attempts = 3;
    return r;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

BenchOptions options(std::vector<Engine> engines) {
    BenchOptions o;
    o.engines = std::move(engines);
    o.base.seed = 5;
    o.base.plan.workers = 2;
    return o;
}

} // namespace

TEST(Suites, Contents) {
    EXPECT_EQ(table3_small_suite(), (std::vector<u64>{77, 143, 231, 255}));
    EXPECT_EQ(table3_full_suite().size(), 10u);
    for (u64 n : table3_full_suite()) {
        u64 p = 1;
        for (u64 f : table3_cofactors().at(n)) p *= f;
        EXPECT_EQ(p, n);
    }
}

TEST(RunSuite, SmallSuiteWithDenseKernel) {
    const auto records = run_benchmark_suite(table3_small_suite(), options({Engine::dense}));
    ASSERT_EQ(records.size(), 4u);
    for (const auto& r : records) {
        EXPECT_TRUE(r.succeeded) << r.n;
        EXPECT_EQ(r.status, RecordStatus::finished);
        EXPECT_EQ(r.cofactors, table3_cofactors().at(r.n)) << r.n;
        EXPECT_EQ(r.engine, Engine::dense);
        EXPECT_GE(r.wall_time_s, 0.0);
    }
}

TEST(RunSuite, EmptyAndInvalidTargets) {
    EXPECT_TRUE(run_benchmark_suite({}, options({Engine::fft})).empty());
    EXPECT_THROW(run_benchmark_suite({77, 13}, options({Engine::fft})), NothingToFactor);
}

TEST(RunSuite, UnfinishedTargetsAreRecorded) {
    auto opt = options({Engine::fft});
    opt.base.max_width = 10;
    opt.base.max_attempts = 32;
    const auto records = run_benchmark_suite({589}, opt);
    ASSERT_EQ(records.size(), 1u);
    // Either a gcd shortcut solved it classically or the width guard stopped it.
    if (!records[0].succeeded) EXPECT_EQ(records[0].status, RecordStatus::memory_guard);

    auto timed = options({Engine::fft});
    timed.base.time_budget_s = 0.0;
    const auto t = run_benchmark_suite({323}, timed);
    EXPECT_FALSE(t[0].succeeded);
    EXPECT_EQ(t[0].status, RecordStatus::time_budget);
}

TEST(RunSuite, ParallelTargetsMatchSequentialResults) {
    auto seq = options({Engine::fft});
    auto par = seq;
    par.parallel_targets = true;
    const auto a = run_benchmark_suite(table3_small_suite(), seq);
    const auto b = run_benchmark_suite(table3_small_suite(), par);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].n, b[i].n);
        EXPECT_EQ(a[i].cofactors, b[i].cofactors);
        EXPECT_EQ(a[i].attempts, b[i].attempts);
    }
}

TEST(Csv, HeaderAndOneRecord) {
    const auto csv = emit_report({sample_record(77, Engine::dense, 1.5, 0.97)}, ReportFormat::csv);
    const auto ls = lines(csv);
    ASSERT_EQ(ls.size(), 2u);
    EXPECT_EQ(ls[0], "n,cofactors,engine,block_size,tiles,workers,seed,wall_time_s,qft_fraction,succeeded");
    EXPECT_EQ(ls[1], "77,7x11,dense,256,1,4,42,1.500000,0.970000,true");
}

TEST(Csv, StableAcrossCalls) {
    const std::vector<BenchRecord> recs{sample_record(77, Engine::dense, 1.25, 0.9),
                                        sample_record(231, Engine::fft, 0.125, 0.3)};
    EXPECT_EQ(emit_csv(recs), emit_csv(recs));
    EXPECT_EQ(emit_csv({}), std::string(kCsvHeader) + "\n");
}

TEST(Json, RoundTrip) {
    std::vector<BenchRecord> recs{sample_record(77, Engine::dense, 1.0 / 3.0, 0.97123456789),
                                  sample_record(423, Engine::tiled, 2.5e-7, 0.1)};
    recs[1].succeeded = false;
    recs[1].status = RecordStatus::time_budget;
    recs[1].plan.tiles = 8;
    EXPECT_EQ(parse_json_report(emit_report(recs, ReportFormat::json)), recs);
    EXPECT_THROW(parse_json_report("{not json"), InvalidInput);
}

TEST(Markdown, SpeedupFooterAgainstFft) {
    const std::vector<BenchRecord> recs{
        sample_record(77, Engine::dense, 4.0, 0.99),
        sample_record(77, Engine::fft, 1.0, 0.2),
        sample_record(143, Engine::dense, 8.0, 0.99),
        sample_record(143, Engine::fft, 1.0, 0.2),
    };
    const auto md = emit_report(recs, ReportFormat::markdown);
    EXPECT_NE(md.find("| n | Cofactors | T_dense [s] | T_fft [s] |"), std::string::npos) << md;
    EXPECT_NE(md.find("| 77 | 7 x 11 | 4.000 | 1.000 |"), std::string::npos) << md;
    // (4 + 8) / (1 + 1)
    EXPECT_NE(md.find("**Speed-up**"), std::string::npos);
    EXPECT_NE(md.find("**6.0**"), std::string::npos) << md;
    EXPECT_NE(md.find("**1.0**"), std::string::npos) << md;
}

TEST(Markdown, SingleEngineHasNoFooterAndShowsUnfinished) {
    auto dnf = sample_record(551, Engine::dense, 3600.0, 0.0);
    dnf.succeeded = false;
    dnf.status = RecordStatus::time_budget;
    const auto md = emit_markdown({sample_record(77, Engine::dense, 1.0, 0.9), dnf});
    EXPECT_EQ(md.find("Speed-up"), std::string::npos);
    EXPECT_NE(md.find("DNF (time_budget)"), std::string::npos);
}

TEST(Report, UnknownFormat) {
    EXPECT_THROW(report_format_from_string("xml"), InvalidInput);
    EXPECT_EQ(report_format_from_string("md"), ReportFormat::markdown);
}

TEST(TraceJson, CarriesChainAndTimes) {
    AttemptTrace t;
    t.target = 15;
    t.x = 2;
    t.q = 256;
    t.k = 1;
    t.m = 192;
    t.candidate = PeriodCandidate{4, {3, 4}, 1, 4};
    t.outcome = FactorOutcome::factors(3, 5);
    t.times[Phase::qft] = 0.5;
    const auto j = to_json(t);
    EXPECT_EQ(j.at("m"), 192);
    EXPECT_EQ(j.at("period"), 4);
    EXPECT_EQ(j.at("outcome"), "factors(3,5)");
    EXPECT_EQ(j.at("phase_times_s").at("qft"), 0.5);
}
