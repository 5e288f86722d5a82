#include "plf/losses.hpp"

#include <string>

#include "plf/errors.hpp"

namespace plf {

CpaSign parse_cpa_sign(std::string_view name) {
  if (name == "literal") return CpaSign::Literal;
  if (name == "aligned") return CpaSign::Aligned;
  throw Error(ErrorKind::Config, "unknown cpa-sign '" + std::string(name) + "'");
}

HistMode parse_hist_mode(std::string_view name) {
  if (name == "soft") return HistMode::Soft;
  if (name == "count") return HistMode::Count;
  throw Error(ErrorKind::Config, "unknown histogram mode '" + std::string(name) + "'");
}

std::string_view to_string(CpaSign sign) { return sign == CpaSign::Literal ? "literal" : "aligned"; }
std::string_view to_string(HistMode mode) { return mode == HistMode::Soft ? "soft" : "count"; }

CPAState CPAState::uniform(int classes, double lambda, HistMode mode) {
  return {Vector::Constant(classes, 1.0 / classes), lambda, mode};
}

namespace {

void require_same_shape(const ProbBatch& a, const ProbBatch& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorKind::Shape, "probability batches differ");
}

void require_mask(const ProbBatch& a, const std::vector<bool>& mask) {
  if (static_cast<Eigen::Index>(mask.size()) != a.rows()) throw Error(ErrorKind::Shape, "mask length != batch size");
}

// d/dq of symmetric_ce(q, Q) with Q held fixed.
double sce_partial(double q, double Q) { return (q > kLogFloor ? -Q / q : 0.0) - clamped_log(Q); }

}  // namespace

double symmetric_ce(const Vector& q, const Vector& Q) {
  if (q.size() != Q.size()) throw Error(ErrorKind::Shape, "probability vectors differ in length");
  double h = 0.0;
  for (Eigen::Index c = 0; c < q.size(); ++c) h -= Q(c) * clamped_log(q(c)) + q(c) * clamped_log(Q(c));
  return h;
}

Matrix softmax_backward(const ProbBatch& q, const Matrix& d_probs) {
  const Eigen::VectorXd inner = q.cwiseProduct(d_probs).rowwise().sum();
  Matrix out = d_probs;
  out.colwise() -= inner;
  return out.cwiseProduct(q);
}

LossGrad unsupervised_loss(const ProbBatch& q, const ProbBatch& Q, const std::vector<bool>& mask) {
  require_same_shape(q, Q);
  require_mask(q, mask);
  const auto batch = q.rows();
  LossGrad out{0.0, Matrix::Zero(batch, q.cols())};
  if (batch == 0) return out;

  Matrix d_probs = Matrix::Zero(batch, q.cols());
  for (Eigen::Index b = 0; b < batch; ++b) {
    if (!mask[static_cast<std::size_t>(b)]) continue;
    out.loss += symmetric_ce(q.row(b).transpose(), Q.row(b).transpose());
    for (Eigen::Index c = 0; c < q.cols(); ++c) d_probs(b, c) = sce_partial(q(b, c), Q(b, c));
  }
  const double inv_b = 1.0 / static_cast<double>(batch);
  out.loss *= inv_b;
  out.d_logits = softmax_backward(q, d_probs) * inv_b;
  return out;
}

Vector teacher_ratio(const ProbBatch& Q, const std::vector<bool>& mask) {
  require_mask(Q, mask);
  const auto classes = Q.cols();
  Vector hist = Vector::Zero(classes);
  Vector conf = Vector::Zero(classes);
  for (Eigen::Index b = 0; b < Q.rows(); ++b) {
    if (!mask[static_cast<std::size_t>(b)]) continue;
    const int c = argmax_class(Q.row(b));
    hist(c) += 1.0;
    conf(c) += Q(b, c);
  }
  Vector ratio = Vector::Zero(classes);
  if (Q.rows() == 0) return ratio;
  const double inv_b = 1.0 / static_cast<double>(Q.rows());
  for (Eigen::Index c = 0; c < classes; ++c) {
    if (hist(c) > 0.0) ratio(c) = (hist(c) * inv_b) / (conf(c) * inv_b + kRatioEps);
  }
  return ratio;
}

CPAState cpa_update_student_hist(const CPAState& state, const ProbBatch& q) {
  if (q.rows() == 0) throw Error(ErrorKind::EmptyBatch, "student histogram of an empty batch");
  if (q.cols() != state.h_tilde.size()) throw Error(ErrorKind::Shape, "batch width != histogram length");

  Vector hist;
  if (state.hist_mode == HistMode::Soft) {
    hist = q.colwise().mean().transpose();
  } else {
    hist = Vector::Zero(q.cols());
    for (Eigen::Index b = 0; b < q.rows(); ++b) hist(argmax_class(q.row(b))) += 1.0;
    hist /= static_cast<double>(q.rows());
  }
  CPAState next = state;
  next.h_tilde = state.lambda * state.h_tilde + (1.0 - state.lambda) * hist;
  return next;
}

StudentRatio student_ratio(const CPAState& state, const ProbBatch& q) {
  if (q.rows() == 0) throw Error(ErrorKind::EmptyBatch, "student ratio of an empty batch");
  if (q.cols() != state.h_tilde.size()) throw Error(ErrorKind::Shape, "batch width != histogram length");
  StudentRatio out;
  out.batch_mean = q.colwise().mean().transpose();
  out.h_tilde = state.h_tilde;
  out.ratio = (state.h_tilde.array() / (out.batch_mean.array() + kRatioEps)).matrix();
  return out;
}

CpaLoss cpa_loss(const Vector& teacher_ratio, const Vector& student_ratio, CpaSign sign) {
  if (teacher_ratio.size() != student_ratio.size()) throw Error(ErrorKind::Shape, "ratio vectors differ in length");
  CpaLoss out{0.0, Vector::Zero(student_ratio.size())};
  if (teacher_ratio.size() == 0 || !(teacher_ratio.maxCoeff() > 0.0)) return out;

  const Vector nt = normalize_sum(teacher_ratio);
  const double total = student_ratio.sum();
  const Vector ns = normalize_sum(student_ratio);
  const double s = sign == CpaSign::Literal ? -1.0 : 1.0;
  out.loss = s * symmetric_ce(nt, ns);

  Vector d_ns(ns.size());
  for (Eigen::Index c = 0; c < ns.size(); ++c) d_ns(c) = s * sce_partial(ns(c), nt(c));
  // Normalize: d ns_i / d r_j = (delta_ij - ns_i) / sum(r)
  out.d_ratio = (d_ns.array() - d_ns.dot(ns)).matrix() / total;
  return out;
}

Matrix student_ratio_backward(const StudentRatio& ratio, const ProbBatch& q, const Vector& d_ratio) {
  if (d_ratio.size() != q.cols()) throw Error(ErrorKind::Shape, "ratio gradient length != class count");
  const Eigen::ArrayXd denom = ratio.batch_mean.array() + kRatioEps;
  const Vector d_mean = (d_ratio.array() * -ratio.h_tilde.array() / denom.square()).matrix();
  Matrix d_probs = d_mean.transpose().replicate(q.rows(), 1) / static_cast<double>(q.rows());
  return softmax_backward(q, d_probs);
}

LossGrad class_prior_alignment(const Vector& teacher_ratio, const StudentRatio& ratio, const ProbBatch& q,
                               CpaSign sign) {
  const CpaLoss l = cpa_loss(teacher_ratio, ratio.ratio, sign);
  return {l.loss, student_ratio_backward(ratio, q, l.d_ratio)};
}

LossBreakdown total_loss(const LossGrad& unsupervised, const LossGrad& alignment, double w_u, double w_c) {
  if (w_u < 0.0 || w_c < 0.0) throw Error(ErrorKind::Config, "loss weights must be non-negative");
  LossBreakdown out;
  out.loss_u = unsupervised.loss;
  out.loss_c = alignment.loss;
  out.total = w_u * unsupervised.loss + w_c * alignment.loss;
  if (w_c == 0.0 || alignment.d_logits.size() == 0) {
    out.d_total_d_student_logits = w_u * unsupervised.d_logits;
  } else {
    out.d_total_d_student_logits = w_u * unsupervised.d_logits + w_c * alignment.d_logits;
  }
  return out;
}

}  // namespace plf
