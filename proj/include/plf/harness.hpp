#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plf/classifier.hpp"
#include "plf/config.hpp"
#include "plf/stream.hpp"
#include "plf/threshold.hpp"

namespace plf {

struct StepMetrics {
  int step = 0;
  int domain_index = 0;
  double error_rate = 0.0;
  double filter_ratio = 0.0;
  std::optional<double> quality;  // absent when no row was kept
  double tau_global = 0.0;
  double tau_class_mean = 0.0;
  double tau_class_min = 0.0;
  double tau_class_max = 0.0;
  double loss_u = 0.0;
  double loss_c = 0.0;
  double total = 0.0;
};

struct RunTrace {
  RunConfig config;
  std::vector<StepMetrics> steps;
  std::vector<double> domain_mean_error;
  double overall_mean_error = 0.0;
  double source_error = 0.0;  // pretrained model on the unshifted source domain
  ThresholdState final_thresholds;
  bool failed = false;
  std::string failure;

  double mean_filter_ratio() const;
  /// Mean over steps that kept at least one row.
  std::optional<double> mean_quality() const;
};

/// The source domain and the shifted test domains a config describes.
struct Stream {
  DomainSpec source;
  StreamSchedule schedule;
};

Stream build_stream(const RunConfig& config);

/// 64-bit mix used to derive independent RNG seeds from the run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id);

/// Pretrain on the source, then adapt online over every domain of the stream.
/// A non-finite loss stops the run and returns the partial trace with failed = true.
RunTrace run_adaptation(const RunConfig& config);

struct SeedResult {
  std::uint64_t seed = 0;
  double mean_error = 0.0;
  double mean_filter_ratio = 0.0;
  std::optional<double> mean_quality;
  bool failed = false;
};

struct ComparisonRow {
  std::string policy;
  double mean_error = 0.0;
  double mean_filter_ratio = 0.0;
  std::optional<double> mean_quality;
  std::vector<SeedResult> per_seed;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<std::uint64_t> seeds;
};

/// Runs every config over every seed. Configs must describe the same stream.
/// Runs are independent and execute on up to `threads` workers (0 = hardware concurrency).
ComparisonTable compare_policies(const std::vector<RunConfig>& configs, const std::vector<std::uint64_t>& seeds,
                                 unsigned threads = 0);

/// Recomputes per-domain and overall means from the step rows.
void summarize(RunTrace& trace);

}  // namespace plf
