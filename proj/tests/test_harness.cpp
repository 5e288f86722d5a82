#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plf/errors.hpp"
#include "plf/harness.hpp"
#include "plf/trace_io.hpp"

namespace plf {
namespace {

RunConfig small_config(const std::string& policy = "plf") {
  RunConfig c;
  c.classes = 3;
  c.dim = 4;
  c.n_domains = 2;
  c.steps_per_domain = 15;
  c.pretrain_steps = 200;
  c.batch_size = 32;
  c.separation = 4.0;
  c.severity = 1.5;
  c.policy = parse_policy(policy);
  return c;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

TEST(Harness, NoFilterKeepsEverything) {
  const RunTrace t = run_adaptation(small_config("no-filter"));
  ASSERT_EQ(t.steps.size(), 30u);
  for (const StepMetrics& s : t.steps) EXPECT_EQ(s.filter_ratio, 1.0);
  EXPECT_DOUBLE_EQ(t.mean_filter_ratio(), 1.0);
}

TEST(Harness, DeterministicTrace) {
  const RunConfig c = small_config();
  EXPECT_EQ(trace_csv(run_adaptation(c)), trace_csv(run_adaptation(c)));
  RunConfig other = c;
  other.seed = 2;
  EXPECT_NE(trace_csv(run_adaptation(c)), trace_csv(run_adaptation(other)));
}

TEST(Harness, DomainMeansMatchSteps) {
  const RunTrace t = run_adaptation(small_config());
  ASSERT_EQ(t.domain_mean_error.size(), 2u);
  double total = 0.0;
  for (int k = 0; k < 2; ++k) {
    double sum = 0.0;
    int n = 0;
    for (const StepMetrics& s : t.steps) {
      if (s.domain_index != k) continue;
      sum += s.error_rate;
      ++n;
    }
    EXPECT_EQ(n, 15);
    EXPECT_NEAR(t.domain_mean_error[static_cast<std::size_t>(k)], sum / n, 1e-12);
    total += sum;
  }
  EXPECT_NEAR(t.overall_mean_error, total / 30.0, 1e-12);
}

TEST(Harness, TotalIsWeightedSum) {
  RunConfig c = small_config();
  c.w_u = 0.7;
  c.w_c = 0.2;
  const RunTrace t = run_adaptation(c);
  for (const StepMetrics& s : t.steps) EXPECT_NEAR(s.total, 0.7 * s.loss_u + 0.2 * s.loss_c, 1e-10);
}

TEST(Harness, SatOnlyHasNoAlignmentLoss) {
  const RunTrace t = run_adaptation(small_config("sat-only"));
  for (const StepMetrics& s : t.steps) EXPECT_EQ(s.loss_c, 0.0);
}

TEST(Harness, ThresholdColumnsAreOrdered) {
  const RunTrace t = run_adaptation(small_config());
  for (const StepMetrics& s : t.steps) {
    EXPECT_LE(s.tau_class_min, s.tau_class_mean);
    EXPECT_LE(s.tau_class_mean, s.tau_class_max);
    EXPECT_GE(s.tau_class_min, 1.0 / 3.0);
    EXPECT_LE(s.tau_class_max, 1.0 - 1e-3);
  }
  const RunTrace fixed = run_adaptation(small_config("fixed(0.8)"));
  for (const StepMetrics& s : fixed.steps) EXPECT_EQ(s.tau_global, 0.8);
}

TEST(Harness, FirstStepKeepsAlmostEverythingAtLowInit) {
  const RunTrace t = run_adaptation(small_config());
  EXPECT_GE(t.steps.front().filter_ratio, 0.95);
}

TEST(TraceIo, CsvShape) {
  RunConfig c = small_config("fixed(0.999)");
  c.separation = 1.0;
  const RunTrace t = run_adaptation(c);
  const std::string csv = trace_csv(t);
  EXPECT_EQ(count_lines(csv), t.steps.size() + 1);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kTraceHeader);
  EXPECT_EQ(csv.find("nan"), std::string::npos);
  EXPECT_EQ(csv.find("NaN"), std::string::npos);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  bool saw_empty_quality = false;
  for (const StepMetrics& s : t.steps) {
    std::getline(in, line);
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    ASSERT_EQ(fields.size(), 12u) << line;
    EXPECT_EQ(fields[4].empty(), !s.quality.has_value());
    saw_empty_quality |= fields[4].empty();
  }
  EXPECT_TRUE(saw_empty_quality) << "stream too easy to exercise the absent-quality path";
}

TEST(TraceIo, WritesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "plf_test_write_trace";
  std::filesystem::remove_all(dir);
  const RunTrace t = run_adaptation(small_config());
  write_trace(t, dir);
  std::ifstream csv(dir / "trace.csv");
  std::stringstream buf;
  buf << csv.rdbuf();
  EXPECT_EQ(buf.str(), trace_csv(t));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
  EXPECT_NE(summary_json(t).find("\"overall_mean_error\""), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(TraceIo, FormatNumberRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.0}) EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Compare, TableStructure) {
  const ComparisonTable table =
      compare_policies({small_config("plf"), small_config("no-filter")}, {1, 2}, 2);
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0].policy, "plf");
  EXPECT_EQ(table.rows[1].policy, "no-filter");
  for (const ComparisonRow& row : table.rows) {
    ASSERT_EQ(row.per_seed.size(), 2u);
    EXPECT_NEAR(row.mean_error, (row.per_seed[0].mean_error + row.per_seed[1].mean_error) / 2, 1e-12);
  }
  EXPECT_EQ(table.rows[1].mean_filter_ratio, 1.0);
  RunConfig seeded = small_config("plf");
  seeded.seed = 2;
  EXPECT_EQ(table.rows[0].per_seed[1].mean_error, run_adaptation(seeded).overall_mean_error);
}

TEST(Compare, RejectsDifferentStreams) {
  RunConfig other = small_config("no-filter");
  other.severity = 2.5;
  try {
    compare_policies({small_config(), other}, {1});
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
}

}  // namespace
}  // namespace plf
