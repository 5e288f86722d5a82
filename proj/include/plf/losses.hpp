#pragma once

#include <string_view>
#include <vector>

#include "plf/numerics.hpp"

namespace plf {

// A scalar loss and its gradient with respect to the student logits (B x C).
struct LossGrad {
  double loss = 0.0;
  Matrix d_logits;
};

struct LossBreakdown {
  double loss_u = 0.0;
  double loss_c = 0.0;
  double total = 0.0;
  Matrix d_total_d_student_logits;
};

// Sign applied to the class-prior alignment cross-entropy.
//   Literal: loss_c = -H(Normalize(R_t), Normalize(R_s))
//   Aligned: loss_c = +H(...)
enum class CpaSign { Literal, Aligned };

// Hist_B(q): column mean of the probabilities, or the argmax count fraction.
enum class HistMode { Soft, Count };

CpaSign parse_cpa_sign(std::string_view name);
HistMode parse_hist_mode(std::string_view name);
std::string_view to_string(CpaSign sign);
std::string_view to_string(HistMode mode);

struct CPAState {
  Vector h_tilde;
  double lambda = 0.9;
  HistMode hist_mode = HistMode::Soft;

  static CPAState uniform(int classes, double lambda = 0.9, HistMode mode = HistMode::Soft);
};

/// -sum Q log q - sum q log Q, logs clamped below at kLogFloor.
double symmetric_ce(const Vector& q, const Vector& Q);

/// Back-propagates dL/dq through a row-wise softmax: dz = q * (dq - <q, dq>).
Matrix softmax_backward(const ProbBatch& q, const Matrix& d_probs);

/// (1/B) sum_b mask_b * H(q_b, Q_b). Teacher Q is a constant.
LossGrad unsupervised_loss(const ProbBatch& q, const ProbBatch& Q, const std::vector<bool>& mask);

/// R_t[c] = hist[c] / (conf[c] + eps) over kept rows; zero for classes with no kept row.
Vector teacher_ratio(const ProbBatch& Q, const std::vector<bool>& mask);

/// h~ <- lambda h~ + (1 - lambda) Hist_B(q). No gradient flows through h~.
CPAState cpa_update_student_hist(const CPAState& state, const ProbBatch& q);

struct StudentRatio {
  Vector ratio;       // R_s = h~ / (p + eps)
  Vector batch_mean;  // p, the column mean of q
  Vector h_tilde;
};

StudentRatio student_ratio(const CPAState& state, const ProbBatch& q);

struct CpaLoss {
  double loss = 0.0;
  Vector d_ratio;  // dL/dR_s
};

/// Normalize(R_t) is a constant; the gradient is taken with respect to R_s only.
/// R_t without a positive entry gives loss 0 and zero gradient.
CpaLoss cpa_loss(const Vector& teacher_ratio, const Vector& student_ratio, CpaSign sign);

/// Chains dL/dR_s through p = mean(q) and the softmax to the student logits.
Matrix student_ratio_backward(const StudentRatio& ratio, const ProbBatch& q, const Vector& d_ratio);

/// cpa_loss composed with student_ratio_backward.
LossGrad class_prior_alignment(const Vector& teacher_ratio, const StudentRatio& ratio, const ProbBatch& q,
                               CpaSign sign);

/// total = w_u * L_u + w_c * L_c, gradients combined with the same weights.
LossBreakdown total_loss(const LossGrad& unsupervised, const LossGrad& alignment, double w_u, double w_c);

}  // namespace plf
