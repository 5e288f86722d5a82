#include "plf/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plf/errors.hpp"

namespace plf {

EdSign parse_ed_sign(std::string_view name) {
  if (name == "corrected") return EdSign::Corrected;
  if (name == "literal") return EdSign::Literal;
  throw Error(ErrorKind::Config, "unknown ed-sign '" + std::string(name) + "'");
}

ClassConfidence parse_class_confidence(std::string_view name) {
  if (name == "argmax-restricted") return ClassConfidence::ArgmaxRestricted;
  if (name == "soft-mean") return ClassConfidence::SoftMean;
  throw Error(ErrorKind::Config, "unknown class-conf-estimator '" + std::string(name) + "'");
}

std::string_view to_string(EdSign sign) { return sign == EdSign::Corrected ? "corrected" : "literal"; }

std::string_view to_string(ClassConfidence estimator) {
  return estimator == ClassConfidence::ArgmaxRestricted ? "argmax-restricted" : "soft-mean";
}

ThresholdState init_thresholds(int classes, const ThresholdOptions& options) {
  return init_thresholds(classes, 1.0 / classes, options);
}

ThresholdState init_thresholds(int classes, double initial_tau, const ThresholdOptions& options) {
  if (classes < 2) throw Error(ErrorKind::Config, "threshold state needs at least two classes");
  if (!(options.lambda > 0.0 && options.lambda < 1.0)) throw Error(ErrorKind::Config, "lambda must lie in (0, 1)");
  if (!(options.alpha > 0.0)) throw Error(ErrorKind::Config, "alpha must be positive");

  ThresholdState s;
  s.floor = 1.0 / classes;
  const double tau = std::clamp(initial_tau, s.floor, s.ceiling);
  s.tau_global = tau;
  s.tau_class = Vector::Constant(classes, tau);
  s.prev_conf_global = s.floor;
  s.prev_conf_class = Vector::Constant(classes, s.floor);
  s.lambda = options.lambda;
  s.alpha = options.alpha;
  s.ed_sign = options.ed_sign;
  s.class_confidence = options.class_confidence;
  return s;
}

double adapt_threshold(double tau, double previous, double current, double lambda, double alpha, EdSign sign) {
  if (current > previous) return lambda * tau + (1.0 - lambda) * current;
  const double drop = previous - current;
  const double exponent = sign == EdSign::Corrected ? -alpha * drop : alpha * drop;
  return tau * std::exp(exponent);
}

ThresholdState update_global(const ThresholdState& state, const ProbBatch& teacher_probs) {
  const double conf = batch_max_confidence(teacher_probs);
  ThresholdState next = state;
  next.tau_global = std::clamp(
      adapt_threshold(state.tau_global, state.prev_conf_global, conf, state.lambda, state.alpha, state.ed_sign),
      state.floor, state.ceiling);
  next.prev_conf_global = conf;
  return next;
}

ThresholdState update_class(const ThresholdState& state, const ProbBatch& teacher_probs) {
  const auto rows = teacher_probs.rows();
  if (rows == 0) throw Error(ErrorKind::EmptyBatch, "class threshold update on an empty batch");
  const int c_count = state.classes();
  if (teacher_probs.cols() != c_count) throw Error(ErrorKind::Shape, "teacher batch width != class count");

  Vector conf_sum = Vector::Zero(c_count);
  Vector hits = Vector::Zero(c_count);
  if (state.class_confidence == ClassConfidence::ArgmaxRestricted) {
    for (Eigen::Index b = 0; b < rows; ++b) {
      const int c = argmax_class(teacher_probs.row(b));
      conf_sum(c) += teacher_probs(b, c);
      hits(c) += 1.0;
    }
  } else {
    conf_sum = teacher_probs.colwise().sum().transpose();
    hits.setConstant(static_cast<double>(rows));
  }

  ThresholdState next = state;
  for (int c = 0; c < c_count; ++c) {
    if (hits(c) == 0.0) continue;  // carry forward
    const double conf = conf_sum(c) / hits(c);
    next.tau_class(c) = std::clamp(adapt_threshold(state.tau_class(c), state.prev_conf_class(c), conf, state.lambda,
                                                   state.alpha, state.ed_sign),
                                   state.floor, state.ceiling);
    next.prev_conf_class(c) = conf;
  }
  return next;
}

Vector combined_thresholds(const ThresholdState& state) {
  const double top = state.tau_class.maxCoeff();
  if (!(top > 0.0)) throw Error(ErrorKind::DegenerateVector, "class thresholds are all zero");
  // (x / x) is exactly 1, so the largest entry reproduces tau_global bit-for-bit.
  return (state.tau_class / top) * state.tau_global;
}

std::vector<bool> filter_mask(const ProbBatch& teacher_probs, const Vector& tau_star) {
  if (teacher_probs.cols() != tau_star.size()) throw Error(ErrorKind::Shape, "threshold count != class count");
  std::vector<bool> keep(static_cast<std::size_t>(teacher_probs.rows()));
  for (Eigen::Index b = 0; b < teacher_probs.rows(); ++b) {
    const int c = argmax_class(teacher_probs.row(b));
    keep[static_cast<std::size_t>(b)] = teacher_probs(b, c) > tau_star(c);
  }
  return keep;
}

}  // namespace plf
