#pragma once

#include <cstdint>

#include "plf/numerics.hpp"
#include "plf/stream.hpp"

namespace plf {

// Linear softmax classifier: logits = W x + b.
struct ModelParams {
  Matrix weights;  // C x d
  Vector bias;     // C

  static ModelParams zeros(int classes, int dim);

  int classes() const { return static_cast<int>(weights.rows()); }
  int dim() const { return static_cast<int>(weights.cols()); }
  bool all_finite() const { return weights.allFinite() && bias.allFinite(); }
};

// Gradients share the parameter layout.
using ParamGrads = ModelParams;

struct AdamState {
  ModelParams first_moment;
  ModelParams second_moment;
  std::int64_t step_count = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const ModelParams& like, double lr = 0.01);
};

struct ForwardResult {
  Matrix logits;   // B x C
  ProbBatch probs; // B x C
};

ForwardResult forward(const ModelParams& params, const Matrix& features);

/// Maps a logit-space gradient to parameter space: dW = G' X, db = column sums of G.
/// Any per-sample averaging lives in G itself (the loss divides by B).
ParamGrads backprop_linear(const ModelParams& params, const Matrix& features, const Matrix& d_logits);

/// One bias-corrected adaptive-moment update. Updates `state` in place and returns the new params.
ModelParams optimizer_step(const ModelParams& params, const ParamGrads& grads, AdamState& state);

struct PretrainOptions {
  int steps = 2000;
  int batch_size = 200;
  double lr = 0.01;
};

/// Supervised cross-entropy fit on labeled source samples, starting from zero weights.
ModelParams pretrain_source(const DomainSpec& spec, const PretrainOptions& options, Rng& rng);

}  // namespace plf
