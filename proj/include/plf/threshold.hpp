#pragma once

#include <string_view>
#include <vector>

#include "plf/numerics.hpp"

namespace plf {

// Sign of the exponential-decay branch. Corrected: tau * exp(-alpha * drop), so a
// confidence drop lowers the threshold. Literal: tau * exp(+alpha * drop).
enum class EdSign { Corrected, Literal };

// How the per-class confidence e_t(c) is estimated from a teacher batch.
enum class ClassConfidence {
  ArgmaxRestricted,  // mean max-probability over rows predicted as c
  SoftMean,          // mean of column c over all rows
};

EdSign parse_ed_sign(std::string_view name);
ClassConfidence parse_class_confidence(std::string_view name);
std::string_view to_string(EdSign sign);
std::string_view to_string(ClassConfidence estimator);

struct ThresholdState {
  double tau_global = 0.0;
  Vector tau_class;
  double prev_conf_global = 0.0;
  Vector prev_conf_class;
  double lambda = 0.9;
  double alpha = 0.4;
  double floor = 0.0;  // 1/C
  double ceiling = 1.0 - 1e-3;
  EdSign ed_sign = EdSign::Corrected;
  ClassConfidence class_confidence = ClassConfidence::ArgmaxRestricted;

  int classes() const { return static_cast<int>(tau_class.size()); }
};

struct ThresholdOptions {
  double lambda = 0.9;
  double alpha = 0.4;
  EdSign ed_sign = EdSign::Corrected;
  ClassConfidence class_confidence = ClassConfidence::ArgmaxRestricted;
};

/// All thresholds and previous confidences start at 1/C.
ThresholdState init_thresholds(int classes, const ThresholdOptions& options = {});

/// Same, but thresholds start at `initial_tau` (clamped to [1/C, ceiling]).
/// Previous confidences still start at 1/C.
ThresholdState init_thresholds(int classes, double initial_tau, const ThresholdOptions& options = {});

/// One EMA/ED step: EMA toward `current` when it rose above `previous`,
/// exponential decay otherwise. Not clamped.
double adapt_threshold(double tau, double previous, double current, double lambda, double alpha, EdSign sign);

ThresholdState update_global(const ThresholdState& state, const ProbBatch& teacher_probs);
ThresholdState update_class(const ThresholdState& state, const ProbBatch& teacher_probs);

/// tau*(c) = tau_class(c) / max_i tau_class(i) * tau_global
Vector combined_thresholds(const ThresholdState& state);

/// Row b is kept iff max(Q_b) > tau*(argmax Q_b).
std::vector<bool> filter_mask(const ProbBatch& teacher_probs, const Vector& tau_star);

}  // namespace plf
