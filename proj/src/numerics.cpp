#include "plf/numerics.hpp"

#include <cmath>
#include <string>

#include "plf/errors.hpp"

namespace plf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::EmptyBatch: return "empty batch";
    case ErrorKind::DegenerateVector: return "degenerate vector";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::TrainingFailure: return "training failure";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Capacity: return "capacity error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

Vector softmax_scaled(const Vector& logits, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidInput, "softmax scale must be positive, got " + std::to_string(beta));
  }
  if (logits.size() == 0) throw Error(ErrorKind::InvalidInput, "empty logit vector");
  if (!logits.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite logit");
  const double top = logits.maxCoeff();
  Vector e = ((logits.array() - top) * beta).exp().matrix();
  return e / e.sum();
}

ProbBatch softmax_rows(const Matrix& logits, double beta) {
  if (!logits.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite logit");
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidInput, "softmax scale must be positive");
  ProbBatch out(logits.rows(), logits.cols());
  for (Eigen::Index b = 0; b < logits.rows(); ++b) {
    const double top = logits.row(b).maxCoeff();
    out.row(b) = ((logits.row(b).array() - top) * beta).exp().matrix();
    out.row(b) /= out.row(b).sum();
  }
  return out;
}

double batch_max_confidence(const ProbBatch& batch) {
  if (batch.rows() == 0) throw Error(ErrorKind::EmptyBatch, "confidence of an empty batch");
  return batch.rowwise().maxCoeff().mean();
}

Vector normalize_sum(const Vector& v) {
  if (v.size() == 0 || !(v.maxCoeff() > 0.0)) {
    throw Error(ErrorKind::DegenerateVector, "cannot normalize a vector with no positive entry");
  }
  return v / v.sum();
}

}  // namespace plf
