#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

namespace plf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// B x C matrix whose rows are class-probability vectors (student q or teacher Q).
using ProbBatch = Matrix;

// Lower clamp applied to every log argument in the cross-entropy terms.
inline constexpr double kLogFloor = 1e-7;

// Guard added to the denominator of every ratio.
inline constexpr double kRatioEps = 1e-8;

inline double clamped_log(double x) { return std::log(x < kLogFloor ? kLogFloor : x); }

/// Softmax of beta * logits, shifted by the max logit before exponentiation.
/// Throws ErrorKind::InvalidInput on a non-finite logit or non-positive beta.
Vector softmax_scaled(const Vector& logits, double beta);

/// Row-wise softmax_scaled over a B x C logit matrix.
ProbBatch softmax_rows(const Matrix& logits, double beta = 1.0);

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
int argmax_class(const Eigen::DenseBase<Derived>& p) {
  int best = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i) {
    if (p(i) > p(best)) best = static_cast<int>(i);
  }
  return best;
}

/// Mean over rows of the per-row maximum probability (E_max).
double batch_max_confidence(const ProbBatch& batch);

/// v / sum(v). Throws ErrorKind::DegenerateVector when no entry is positive.
Vector normalize_sum(const Vector& v);

}  // namespace plf
