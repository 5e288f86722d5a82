#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plf/losses.hpp"
#include "plf/mean_teacher.hpp"
#include "plf/stream.hpp"
#include "plf/threshold.hpp"

namespace plf {

enum class PolicyKind {
  Plf,           // adaptive global + class thresholds, CPA on
  SatOnly,       // adaptive thresholds, CPA off
  CpaOnlyFixed,  // fixed threshold, CPA on
  Fixed,         // fixed threshold, CPA off
  NoFilter,      // every row kept, CPA off
  GlobalOnly,    // tau*(c) = tau_global for every class, CPA on
};

struct Policy {
  PolicyKind kind = PolicyKind::Plf;
  double fixed_tau = 0.8;  // used by Fixed and CpaOnlyFixed

  bool adaptive() const;
  bool uses_cpa() const;
};

/// Accepts plf, sat-only, cpa-only-fixed, fixed, no-filter, global-only.
/// Fixed-threshold policies also take a value: fixed(0.8) or fixed@0.8.
Policy parse_policy(std::string_view text, double default_tau = 0.8);
std::string to_string(const Policy& policy);

enum class EvalModel { Teacher, Student };

struct RunConfig {
  int classes = 10;
  int dim = 32;

  // stream
  int n_domains = 5;
  int steps_per_domain = 500;
  ShiftKind shift_kind = ShiftKind::MeanTranslation;
  double severity = 4.0;
  std::vector<double> severity_ramp;  // overrides `severity` per domain when set
  double separation = 6.0;
  int pretrain_steps = 2000;

  // adaptation
  int batch_size = 200;
  double lr = 0.01;
  double teacher_momentum = 0.9;
  double lambda = 0.9;
  double alpha = 0.4;
  double w_u = 0.5;
  double w_c = 0.5;
  Policy policy;
  std::optional<double> init_tau;  // unset: 1/C
  EdSign ed_sign = EdSign::Corrected;
  CpaSign cpa_sign = CpaSign::Literal;
  ClassConfidence class_confidence = ClassConfidence::ArgmaxRestricted;
  HistMode hist_mode = HistMode::Soft;
  PerturbConfig perturb;
  bool swap_augment = false;  // student on strong input, teacher on weak
  EvalModel eval_model = EvalModel::Teacher;

  std::uint64_t seed = 1;
  std::string output_dir = "out";

  /// Severity applied to domain k.
  double domain_severity(int k) const;

  /// Throws ErrorKind::Config on the first out-of-range field.
  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and bad values
/// throw ErrorKind::Config with the line number. Missing keys keep their defaults.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& config);

/// Same stream shape and source model settings; the adaptation policy knobs and the
/// seed (set per run by comparisons) may differ.
bool same_stream(const RunConfig& a, const RunConfig& b);

/// Severity ramp (k+1)/n * severity for k = 0..n-1, the gradual preset.
std::vector<double> gradual_ramp(int n_domains, double severity);

}  // namespace plf
