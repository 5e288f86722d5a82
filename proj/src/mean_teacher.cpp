#include "plf/mean_teacher.hpp"

#include <random>

#include "plf/errors.hpp"

namespace plf {

TeacherState teacher_ema_update(const TeacherState& teacher, const ModelParams& student) {
  if (teacher.params.weights.rows() != student.weights.rows() ||
      teacher.params.weights.cols() != student.weights.cols() || teacher.params.bias.size() != student.bias.size()) {
    throw Error(ErrorKind::Shape, "teacher and student shapes differ");
  }
  const double m = teacher.momentum;
  TeacherState out{teacher.params, m};
  out.params.weights = m * teacher.params.weights + (1.0 - m) * student.weights;
  out.params.bias = m * teacher.params.bias + (1.0 - m) * student.bias;
  return out;
}

void validate(const PerturbConfig& cfg) {
  if (cfg.weak_noise_std < 0.0 || cfg.strong_noise_std < 0.0) {
    throw Error(ErrorKind::Config, "perturbation noise must be non-negative");
  }
  if (cfg.strong_noise_std < cfg.weak_noise_std) {
    throw Error(ErrorKind::Config, "strong noise must be at least the weak noise");
  }
  if (!(cfg.strong_mask_prob >= 0.0 && cfg.strong_mask_prob <= 1.0)) {
    throw Error(ErrorKind::Config, "mask probability must lie in [0, 1]");
  }
}

namespace {

template <typename Row>
void add_noise(Row&& row, double stddev, Rng& rng) {
  if (stddev == 0.0) return;
  std::normal_distribution<double> normal;
  for (Eigen::Index j = 0; j < row.size(); ++j) row(j) += stddev * normal(rng);
}

template <typename Row>
void drop_coordinates(Row&& row, double prob, Rng& rng) {
  if (prob <= 0.0) return;
  std::bernoulli_distribution drop(prob);
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (drop(rng)) row(j) = 0.0;
  }
}

}  // namespace

Vector perturb_weak(const Vector& x, const PerturbConfig& cfg, Rng& rng) {
  Vector out = x;
  add_noise(out, cfg.weak_noise_std, rng);
  return out;
}

Vector perturb_strong(const Vector& x, const PerturbConfig& cfg, Rng& rng) {
  Vector out = x;
  add_noise(out, cfg.strong_noise_std, rng);
  drop_coordinates(out, cfg.strong_mask_prob, rng);
  return out;
}

Matrix perturb_weak(const Matrix& x, const PerturbConfig& cfg, Rng& rng) {
  Matrix out = x;
  for (Eigen::Index b = 0; b < out.rows(); ++b) add_noise(out.row(b), cfg.weak_noise_std, rng);
  return out;
}

Matrix perturb_strong(const Matrix& x, const PerturbConfig& cfg, Rng& rng) {
  Matrix out = x;
  for (Eigen::Index b = 0; b < out.rows(); ++b) {
    add_noise(out.row(b), cfg.strong_noise_std, rng);
    drop_coordinates(out.row(b), cfg.strong_mask_prob, rng);
  }
  return out;
}

}  // namespace plf
