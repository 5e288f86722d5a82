#pragma once

#include <cstdint>
#include <vector>

#include "plf/numerics.hpp"

namespace plf {

/// Phi(x) via erfc, accurate to well below 1e-9 absolute.
double std_normal_cdf(double x);

// Binary Gaussian setting: X | Y=-1 ~ N(mu1, sigma1^2), X | Y=+1 ~ N(mu2, sigma2^2),
// mu1 > mu2, equal priors, confidence s(x) = sigmoid(beta (x - (mu1 + mu2)/2)).
struct BinaryCpdParams {
  double mu1 = 1.0;
  double mu2 = -1.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double beta = 1.0;
  double tau = 0.8;
};

void validate(const BinaryCpdParams& params);

// Distribution of the thresholded pseudo-label. For the binary case
// p_class = {P(Y_p = +1), P(Y_p = -1)}.
struct PseudoLabelDist {
  Vector p_class;
  double p_mask = 0.0;

  double p_pos() const { return p_class(0); }
  double p_neg() const { return p_class(1); }
};

/// Closed form: with c = log(tau/(1-tau))/beta, a = (mu2-mu1)/2, b = -a,
///   p_pos = Phi((a-c)/sigma2)/2 + Phi((b-c)/sigma1)/2
///   p_neg = Phi((a-c)/sigma1)/2 + Phi((b-c)/sigma2)/2
PseudoLabelDist binary_cpd(const BinaryCpdParams& params);

/// Multiclass distribution with the competing logits evaluated at their means:
///   P(Y_p = c) = Phi((mu_c - log(tau/(1-tau))/beta - log(sum_{i!=c} e^{beta mu_i})/beta) / sigma_c)
/// Negative values clip to 0; if the class mass exceeds 1 it is rescaled to sum to 1.
/// This is an approximation of the fully random-logit model.
PseudoLabelDist multiclass_cpd(const Vector& mu, const Vector& sigma, double beta, double tau);

/// Brute-force oracle for binary_cpd: samples the equal-prior mixture and applies the tau rule.
PseudoLabelDist mc_cpd_binary(const BinaryCpdParams& params, std::int64_t n_samples, std::uint64_t seed);

/// Brute-force oracle for the multiclass setting: independent logits l_i ~ N(mu_i, sigma_i^2),
/// confidence softmax(beta l); the top class is kept when its confidence exceeds tau.
PseudoLabelDist mc_cpd_multiclass(const Vector& mu, const Vector& sigma, double beta, double tau,
                                  std::int64_t n_samples, std::uint64_t seed);

/// tau = 1 / (sum_{i!=c} e^{beta (mu_i - mu_c)} + 1), minimised over c.
/// Equal means give exactly 1/C.
double recommended_init_threshold(const Vector& mu, double beta);

struct TheoryGridRow {
  double mu_gap = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  double beta = 0.0;
  PseudoLabelDist analytic;
  PseudoLabelDist monte_carlo;
  double max_abs_dev = 0.0;
};

/// 27-point grid: mu gap {1,2,4} x sigma {0.5,1,2} x tau {0.6,0.8,0.95}, beta 1.
std::vector<TheoryGridRow> run_theory_grid(std::int64_t n_samples, std::uint64_t seed);

struct MonotonicityReport {
  int checks = 0;
  int violations = 0;
  double worst_violation = 0.0;
};

/// p_mask is non-decreasing in tau on 0.51, 0.52, ..., 0.99.
MonotonicityReport check_mask_monotone_in_tau(const BinaryCpdParams& base, double slack = 1e-9);
/// p_mask is non-increasing in beta on a geometric grid (factor 1.25).
MonotonicityReport check_mask_monotone_in_beta(const BinaryCpdParams& base, double slack = 1e-9);
/// p_mask is non-increasing in |mu1 - mu2| on a grid of step 0.25.
MonotonicityReport check_mask_monotone_in_gap(const BinaryCpdParams& base, double slack = 1e-9);

}  // namespace plf
