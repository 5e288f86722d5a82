#include "plf/classifier.hpp"

#include <cmath>
#include <string>

#include "plf/errors.hpp"

namespace plf {

namespace {

void require_same_shape(const ModelParams& a, const ModelParams& b) {
  if (a.weights.rows() != b.weights.rows() || a.weights.cols() != b.weights.cols() ||
      a.bias.size() != b.bias.size()) {
    throw Error(ErrorKind::Shape, "parameter shapes differ");
  }
}

}  // namespace

ModelParams ModelParams::zeros(int classes, int dim) {
  return {Matrix::Zero(classes, dim), Vector::Zero(classes)};
}

AdamState AdamState::for_params(const ModelParams& like, double lr) {
  AdamState s;
  s.first_moment = ModelParams::zeros(like.classes(), like.dim());
  s.second_moment = ModelParams::zeros(like.classes(), like.dim());
  s.lr = lr;
  return s;
}

ForwardResult forward(const ModelParams& params, const Matrix& features) {
  if (features.cols() != params.weights.cols()) {
    throw Error(ErrorKind::Shape, "feature dim " + std::to_string(features.cols()) + " != model dim " +
                                      std::to_string(params.weights.cols()));
  }
  ForwardResult out;
  out.logits = features * params.weights.transpose();
  out.logits.rowwise() += params.bias.transpose();
  out.probs = softmax_rows(out.logits, 1.0);
  return out;
}

ParamGrads backprop_linear(const ModelParams& params, const Matrix& features, const Matrix& d_logits) {
  if (d_logits.rows() != features.rows() || d_logits.cols() != params.weights.rows() ||
      features.cols() != params.weights.cols()) {
    throw Error(ErrorKind::Shape, "backprop shapes are inconsistent");
  }
  ParamGrads g;
  g.weights = d_logits.transpose() * features;
  g.bias = d_logits.colwise().sum().transpose();
  return g;
}

ModelParams optimizer_step(const ModelParams& params, const ParamGrads& grads, AdamState& state) {
  require_same_shape(params, grads);
  require_same_shape(params, state.first_moment);
  if (!grads.all_finite()) throw Error(ErrorKind::TrainingFailure, "non-finite gradient");

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);

  auto update = [&](auto& m, auto& v, const auto& g, const auto& p) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    return (p.array() - state.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + state.eps)).matrix().eval();
  };

  ModelParams next;
  next.weights = update(state.first_moment.weights, state.second_moment.weights, grads.weights, params.weights);
  next.bias = update(state.first_moment.bias, state.second_moment.bias, grads.bias, params.bias);
  return next;
}

ModelParams pretrain_source(const DomainSpec& spec, const PretrainOptions& options, Rng& rng) {
  validate(spec);
  ModelParams params = ModelParams::zeros(spec.classes(), spec.dim());
  AdamState adam = AdamState::for_params(params, options.lr);

  for (int step = 0; step < options.steps; ++step) {
    const SampleBatch batch = sample_batch(spec, options.batch_size, rng);
    const ForwardResult fwd = forward(params, batch.features);

    // Mean cross-entropy; d/dlogits = (p - onehot) / B.
    Matrix d_logits = fwd.probs;
    double loss = 0.0;
    for (int b = 0; b < options.batch_size; ++b) {
      const int y = batch.true_labels[b];
      loss -= clamped_log(fwd.probs(b, y));
      d_logits(b, y) -= 1.0;
    }
    d_logits /= static_cast<double>(options.batch_size);
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::TrainingFailure, "non-finite pretraining loss at step " + std::to_string(step));
    }
    params = optimizer_step(params, backprop_linear(params, batch.features, d_logits), adam);
  }
  return params;
}

}  // namespace plf
