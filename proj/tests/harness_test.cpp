#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "incomp/harness.hpp"
#include "incomp/stats.hpp"

namespace incomp {
namespace {

// Reference outputs of SplitMix64 from state 0.
TEST(SplitMix64, ReferenceSequence) {
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xe220a8397b1dcdafull);
  EXPECT_EQ(g(), 0x6e789e6aa1b965f4ull);
  EXPECT_EQ(g(), 0x06c45d188009454full);
}

TEST(SeededBits, GoldenFile) {
  std::ifstream in(std::string(INCOMP_GOLDEN_DIR) + "/seeded_bits_seed0.txt");
  ASSERT_TRUE(in) << "missing golden file";
  std::string expected;
  std::getline(in, expected);
  EXPECT_EQ(seeded_bits(0, 0, expected.size()).to_string(), expected);
}

TEST(SeededBits, Contract) {
  EXPECT_TRUE(seeded_bits(5, 1, 0).empty());
  EXPECT_EQ(seeded_bits(5, 1, 300), seeded_bits(5, 1, 300));
  EXPECT_NE(seeded_bits(5, 1, 300), seeded_bits(5, 2, 300));
  EXPECT_NE(seeded_bits(5, 1, 300), seeded_bits(6, 1, 300));
  // prefix-stable in the count
  EXPECT_EQ(seeded_bits(5, 1, 100), seeded_bits(5, 1, 300).slice(0, 100));
}

TEST(SeededBits, OnesFraction) {
  const auto bits = seeded_bits(42, 0, 1'000'000);
  const double frac = static_cast<double>(bits.popcount()) / 1e6;
  EXPECT_NEAR(frac, 0.5, 0.002);
}

TEST(SeededBits, OnesDeviationTail) {
  const std::size_t n = 1024;
  std::size_t beyond = 0;
  for (std::uint64_t t = 0; t < 10'000; ++t) {
    const auto b = stats::block_stats(seeded_bits(1, t, n));
    beyond += b.ones_deviation > 3 * std::sqrt(static_cast<double>(n));
  }
  EXPECT_LE(beyond, 100u);
}

TEST(BlockStats, Examples) {
  const auto a = stats::block_stats(BitString::from_string("0101"));
  EXPECT_EQ(a.ones_deviation, 0.0);
  EXPECT_EQ(a.discordant_pairs, 2u);
  const auto b = stats::block_stats(BitString(9, true));
  EXPECT_EQ(b.ones_deviation, 4.5);
  EXPECT_EQ(b.discordant_pairs, 0u);
  const auto c = stats::block_stats(BitString::from_string("001010"), {{0, 1, 2}, {0, 1}, {5, 4}});
  EXPECT_EQ(c.first_one_depth, (std::vector<std::size_t>{3, 0, 2}));
}

TEST(BlockStats, DiscordantMean) {
  const std::size_t n = 4096, trials = 10'000;
  double sum = 0;
  for (std::uint64_t t = 0; t < trials; ++t) sum += stats::block_stats(seeded_bits(3, t, n)).discordant_pairs;
  const double mean = sum / trials;
  const double se = std::sqrt(1024 * 0.5 * 0.5 * 2) / std::sqrt(static_cast<double>(trials));
  EXPECT_NEAR(mean, 1024.0, 3 * se);
}

TEST(Summarize, Examples) {
  const auto one = stats::summarize({{3, 7.5}});
  EXPECT_EQ(one.mean, 7.5);
  EXPECT_FALSE(one.stddev);
  EXPECT_FALSE(one.slope);
  const auto s = stats::summarize({{2, 4}, {4, 16}});
  ASSERT_TRUE(s.slope);
  EXPECT_NEAR(s.slope->slope, 2.0, 1e-12);
  EXPECT_THROW(stats::summarize({}), std::invalid_argument);
}

TEST(Summarize, OrderIndependent) {
  std::vector<stats::Row> rows;
  SplitMix64 rng(4);
  for (int k = 0; k < 500; ++k)
    rows.push_back({static_cast<double>(8 << rng.below(4)), static_cast<double>(rng.below(1000)) / 7.0});
  const auto a = stats::summarize(rows);
  std::reverse(rows.begin(), rows.end());
  std::swap(rows[3], rows[400]);
  const auto b = stats::summarize(rows);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(*a.stddev, *b.stddev);
  EXPECT_EQ(a.mean_by_size, b.mean_by_size);
  EXPECT_EQ(a.slope->slope, b.slope->slope);
}

namespace h = harness;

TEST(Config, ParsesKeyValueText) {
  const auto cfg = h::parse_config(
      "# comment\nexperiment = majority_bench\nsizes = 8, 16..18\ntrials=3\nseed = 7\n"
      "mode = verified\nworkers = 2\nL = 9\n");
  EXPECT_EQ(cfg.experiment, h::Experiment::majority_bench);
  EXPECT_EQ(cfg.sizes, (std::vector<std::uint64_t>{8, 16, 17, 18}));
  EXPECT_EQ(cfg.trials, 3u);
  EXPECT_EQ(cfg.master_seed, 7u);
  EXPECT_EQ(cfg.mode, "verified");
  EXPECT_EQ(cfg.workers, 2u);
  EXPECT_EQ(cfg.option("L", 0), 9u);
  EXPECT_THROW(h::parse_config("sizes = 3\n"), h::ConfigError);
  EXPECT_THROW(h::parse_config("experiment = nope\n"), h::ConfigError);
  EXPECT_THROW(h::parse_config("experiment = codes_check\ntrials = x\n"), h::ConfigError);
  EXPECT_THROW(h::parse_config("experiment = codes_check\nbare line\n"), h::ConfigError);
}

h::ExperimentConfig make(h::Experiment e, std::vector<std::uint64_t> sizes, std::uint64_t trials,
                         std::uint64_t seed, unsigned workers) {
  h::ExperimentConfig cfg;
  cfg.experiment = e;
  cfg.sizes = std::move(sizes);
  cfg.trials = trials;
  cfg.master_seed = seed;
  cfg.workers = workers;
  return cfg;
}

TEST(Experiments, MajorityReproducibleAcrossWorkers) {
  auto cfg = make(h::Experiment::majority_bench, {1024}, 3, 7, 1);
  const auto a = h::run_experiment(cfg);
  const auto b = h::run_experiment(cfg);
  cfg.workers = 3;
  const auto c = h::run_experiment(cfg);
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.csv, c.csv);
  EXPECT_EQ(a.summary.dump(), c.summary.dump());
  EXPECT_EQ(a.csv.substr(0, a.csv.find('\n')), "n,trial,comparisons,verdict,oracle_agrees");
}

TEST(Experiments, MatmulSummaryHasSlope) {
  auto cfg = make(h::Experiment::matmul_bench, {64, 128, 256}, 4, 1, 2);
  cfg.options["verify"] = "1";
  const auto r = h::run_experiment(cfg);
  EXPECT_TRUE(r.summary.contains("slope_log_mean_probes"));
  EXPECT_TRUE(r.summary.contains("slope_runtime_proxy"));
  EXPECT_EQ(r.summary["oracle_mismatches"], 0);
  EXPECT_TRUE(r.passed);
  cfg.workers = 1;
  EXPECT_EQ(h::run_experiment(cfg).csv, r.csv);
}

TEST(Experiments, CommsimVerifyN5) {
  const auto r = h::run_experiment(make(h::Experiment::commsim_verify, {5}, 1, 0, 2));
  EXPECT_EQ(r.summary["failures"], 0);
  EXPECT_EQ(r.summary["checks_run"], 528);
  EXPECT_EQ(r.summary["mean_cost"], 5.0);
  EXPECT_TRUE(r.passed);
}

TEST(Experiments, DescsysAndCodes) {
  auto d = make(h::Experiment::descsys_check, {}, 5, 3, 2);
  d.options["L"] = "10";
  d.options["universe"] = "6";
  const auto r = h::run_experiment(d);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.summary["checks_run"], 30);
  const auto c = h::run_experiment(make(h::Experiment::codes_check, {8}, 1, 0, 1));
  EXPECT_TRUE(c.passed);
  EXPECT_EQ(std::count(c.csv.begin(), c.csv.end(), '\n'), 5);
}

TEST(Experiments, WritesCsvAndSummary) {
  const auto dir = std::filesystem::temp_directory_path() / "incomp_harness_test";
  std::filesystem::remove_all(dir);
  const auto r = h::run_experiment(make(h::Experiment::codes_check, {4}, 1, 0, 1));
  h::write_result(r, dir / "codes.csv");
  std::ifstream csv(dir / "codes.csv");
  std::stringstream buf;
  buf << csv.rdbuf();
  EXPECT_EQ(buf.str(), r.csv);
  EXPECT_TRUE(std::filesystem::exists(dir / "codes.summary.json"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace incomp
