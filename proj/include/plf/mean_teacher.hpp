#pragma once

#include "plf/classifier.hpp"
#include "plf/stream.hpp"

namespace plf {

struct TeacherState {
  ModelParams params;
  double momentum = 0.9;
};

/// theta_t <- m * theta_t + (1 - m) * theta_s, per coordinate.
TeacherState teacher_ema_update(const TeacherState& teacher, const ModelParams& student);

// Feature-space stand-ins for the weak (student) and strong (teacher) augmentations.
struct PerturbConfig {
  double weak_noise_std = 0.05;
  double strong_noise_std = 0.2;
  double strong_mask_prob = 0.1;
};

void validate(const PerturbConfig& cfg);

/// x + weak_noise_std * N(0, I)
Vector perturb_weak(const Vector& x, const PerturbConfig& cfg, Rng& rng);

/// x + strong_noise_std * N(0, I), then each coordinate zeroed with probability strong_mask_prob.
Vector perturb_strong(const Vector& x, const PerturbConfig& cfg, Rng& rng);

// Row-wise versions; they draw from `rng` in the same order as the per-vector calls.
Matrix perturb_weak(const Matrix& x, const PerturbConfig& cfg, Rng& rng);
Matrix perturb_strong(const Matrix& x, const PerturbConfig& cfg, Rng& rng);

}  // namespace plf
