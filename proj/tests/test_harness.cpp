#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sop/harness.hpp"
#include "support/fixtures.hpp"

using namespace sop;

namespace {

RawRecord record(std::string instance, Cost cost, std::uint64_t seed = 1) {
    return RawRecord{std::move(instance), "eacs", "sop3", seed, cost, 100, 5};
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("sop_harness_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

ExperimentSpec fixture_spec(std::size_t runs) {
    ExperimentSpec spec;
    spec.instances = {std::filesystem::path(SOP_DATA_DIR) / "t4.sop"};
    spec.config.max_iterations = 5;
    spec.config.local_search = LocalSearchKind::sop3;
    spec.runs = runs;
    return spec;
}

}  // namespace

TEST(Summarize, IdenticalCosts) {
    const auto rows = summarize({record("a", 4216), record("a", 4216), record("a", 4216)});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].mean_cost, 4216.0);
    EXPECT_EQ(rows[0].std_cost, 0.0);
    EXPECT_EQ(rows[0].best_cost, 4216);
    EXPECT_EQ(rows[0].algorithm, "eacs+sop3");
}

TEST(Summarize, SampleStandardDeviation) {
    const auto rows = summarize({record("a", 10), record("a", 20)});
    EXPECT_EQ(rows[0].mean_cost, 15.0);
    EXPECT_NEAR(rows[0].std_cost, 7.0710678118654755, 1e-12);
    EXPECT_EQ(rows[0].best_cost, 10);
}

TEST(Summarize, SingleSample) {
    const auto rows = summarize({record("a", 33)});
    EXPECT_EQ(rows[0].mean_cost, 33.0);
    EXPECT_EQ(rows[0].best_cost, 33);
    EXPECT_EQ(rows[0].std_cost, 0.0);
    EXPECT_TRUE(rows[0].single_sample());
}

TEST(Summarize, GroupsInFirstAppearanceOrder) {
    auto other = record("a", 1);
    other.algorithm = "acs";
    const auto rows = summarize({record("b", 5), record("a", 7), other, record("b", 9)});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].instance, "b");
    EXPECT_EQ(rows[0].samples, 2u);
    EXPECT_EQ(rows[1].instance, "a");
    EXPECT_EQ(rows[2].algorithm, "acs+sop3");
    for (const auto& r : rows) {
        EXPECT_LE(static_cast<double>(r.best_cost), r.mean_cost);
        EXPECT_GE(r.std_cost, 0.0);
    }
}

TEST(RawCsv, RoundTrip) {
    std::vector<RawRecord> records;
    for (std::uint64_t k = 0; k < 20; ++k) records.push_back(record("R.200.100." + std::to_string(k), 1000 + 7 * k, k));
    const auto text = raw_records_csv(records);
    EXPECT_EQ(text.substr(0, text.find('\n')), kRawCsvHeader);
    EXPECT_EQ(parse_raw_records_csv(text), records);
    EXPECT_THROW(parse_raw_records_csv("bad\n"), std::invalid_argument);
    EXPECT_THROW(parse_raw_records_csv(std::string(kRawCsvHeader) + "\na,b,c\n"), std::invalid_argument);
    EXPECT_THROW(parse_raw_records_csv(std::string(kRawCsvHeader) + "\na,b,c,x,1,1,1\n"), std::invalid_argument);
}

TEST(Experiment, SingleReplicationFlag) {
    const auto result = run_experiment(fixture_spec(1));
    ASSERT_EQ(result.summary.size(), 1u);
    EXPECT_TRUE(result.summary[0].single_sample());
    EXPECT_EQ(result.summary[0].std_cost, 0.0);
    EXPECT_EQ(result.summary[0].best_cost, 6);
}

TEST(Experiment, SeedsAndDeterminism) {
    auto spec = fixture_spec(4);
    spec.instances.push_back(std::filesystem::path(SOP_DATA_DIR) / "t4.soplib");
    spec.config.seed = 10;
    const auto a = run_experiment(spec);
    spec.jobs = 3;
    const auto b = run_experiment(spec);
    ASSERT_EQ(a.records.size(), 8u);
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        EXPECT_EQ(a.records[k].seed, 10 + k % 4);
        EXPECT_EQ(a.records[k].best_cost, b.records[k].best_cost);
        EXPECT_EQ(a.records[k].iterations, b.records[k].iterations);
        EXPECT_EQ(a.records[k].instance, b.records[k].instance);
    }
    EXPECT_EQ(a.records[0].instance, "T4");
    EXPECT_EQ(a.records[4].instance, "t4.soplib");
}

TEST(Experiment, WritesCsvFilesThatRecomputeTheSummary) {
    auto spec = fixture_spec(3);
    spec.output_dir = scratch_dir("csv");
    spec.trace = true;
    const auto result = run_experiment(spec);
    const auto parsed = parse_raw_records_csv(slurp(spec.output_dir / "runs.csv"));
    EXPECT_EQ(parsed, result.records);
    EXPECT_EQ(summary_csv(summarize(parsed)), slurp(spec.output_dir / "summary.csv"));
    std::size_t traces = 0;
    for (const auto& e : std::filesystem::directory_iterator(spec.output_dir))
        traces += e.path().filename().string().rfind("trace_", 0) == 0;
    EXPECT_EQ(traces, 3u);
    const auto trace = slurp(spec.output_dir / "trace_T4_eacs+sop3_1.csv");
    EXPECT_EQ(trace.substr(0, trace.find('\n')), "iteration,best_cost,active_cost,temperature");
    std::filesystem::remove_all(spec.output_dir);
}

TEST(Experiment, WritesJson) {
    auto spec = fixture_spec(2);
    spec.output_dir = scratch_dir("json");
    spec.format = ExportFormat::json;
    run_experiment(spec);
    const auto j = nlohmann::json::parse(slurp(spec.output_dir / "results.json"));
    EXPECT_EQ(j["runs"].size(), 2u);
    EXPECT_EQ(j["summary"][0]["best_cost"], 6);
    EXPECT_EQ(j["summary"][0]["single_sample"], false);
    std::filesystem::remove_all(spec.output_dir);
}

TEST(Experiment, Errors) {
    auto spec = fixture_spec(0);
    EXPECT_THROW(run_experiment(spec), ConfigError);
    spec = fixture_spec(1);
    spec.instances = {std::filesystem::path(SOP_DATA_DIR) / "missing.sop"};
    EXPECT_THROW(run_experiment(spec), InstanceError);
    spec = fixture_spec(1);
    spec.instances = {std::filesystem::path(SOP_DATA_DIR) / "short_row.sop"};
    EXPECT_THROW(run_experiment(spec), InstanceError);
    spec = fixture_spec(1);
    spec.output_dir = std::filesystem::path(SOP_DATA_DIR) / "t4.sop" / "sub";
    EXPECT_THROW(run_experiment(spec), std::runtime_error);
}
