#include "plf/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "plf/errors.hpp"

namespace plf {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void validate(const BinaryCpdParams& p) {
  if (!(p.mu1 > p.mu2)) throw Error(ErrorKind::Domain, "binary setting requires mu1 > mu2");
  if (!(p.sigma1 > 0.0 && p.sigma2 > 0.0)) throw Error(ErrorKind::Domain, "class stddevs must be positive");
  if (!(p.beta > 0.0)) throw Error(ErrorKind::Domain, "beta must be positive");
  if (!(p.tau > 0.5 && p.tau < 1.0)) throw Error(ErrorKind::Domain, "tau must lie in (1/2, 1)");
}

PseudoLabelDist binary_cpd(const BinaryCpdParams& p) {
  validate(p);
  const double c = std::log(p.tau / (1.0 - p.tau)) / p.beta;
  const double a = (p.mu2 - p.mu1) / 2.0;
  const double b = (p.mu1 - p.mu2) / 2.0;
  PseudoLabelDist d;
  d.p_class.resize(2);
  d.p_class(0) = 0.5 * std_normal_cdf((a - c) / p.sigma2) + 0.5 * std_normal_cdf((b - c) / p.sigma1);
  d.p_class(1) = 0.5 * std_normal_cdf((a - c) / p.sigma1) + 0.5 * std_normal_cdf((b - c) / p.sigma2);
  d.p_mask = std::max(0.0, 1.0 - d.p_class.sum());
  return d;
}

PseudoLabelDist multiclass_cpd(const Vector& mu, const Vector& sigma, double beta, double tau) {
  const auto classes = mu.size();
  if (classes < 2) throw Error(ErrorKind::Domain, "need at least two classes");
  if (sigma.size() != classes) throw Error(ErrorKind::Shape, "sigma length != class count");
  if ((sigma.array() <= 0.0).any()) throw Error(ErrorKind::Domain, "class stddevs must be positive");
  if (!(beta > 0.0)) throw Error(ErrorKind::Domain, "beta must be positive");
  if (!(tau > 1.0 / static_cast<double>(classes) && tau < 1.0)) throw Error(ErrorKind::Domain, "tau must lie in (1/C, 1)");

  const double offset = std::log(tau / (1.0 - tau)) / beta;
  PseudoLabelDist d;
  d.p_class.resize(classes);
  for (Eigen::Index c = 0; c < classes; ++c) {
    // log-sum-exp over the competitors, shifted by their max
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < classes; ++i) {
      if (i != c) top = std::max(top, beta * mu(i));
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < classes; ++i) {
      if (i != c) acc += std::exp(beta * mu(i) - top);
    }
    const double lse = (top + std::log(acc)) / beta;
    d.p_class(c) = std::max(0.0, std_normal_cdf((mu(c) - offset - lse) / sigma(c)));
  }
  const double mass = d.p_class.sum();
  if (mass > 1.0) {
    d.p_class /= mass;
    d.p_mask = 0.0;
  } else {
    d.p_mask = 1.0 - mass;
  }
  return d;
}

PseudoLabelDist mc_cpd_binary(const BinaryCpdParams& p, std::int64_t n_samples, std::uint64_t seed) {
  validate(p);
  if (n_samples < 1) throw Error(ErrorKind::InvalidInput, "need at least one sample");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal;
  const double mid = (p.mu1 + p.mu2) / 2.0;

  std::int64_t pos = 0, neg = 0;
  for (std::int64_t n = 0; n < n_samples; ++n) {
    const bool first = coin(rng);
    const double x = first ? p.mu1 + p.sigma1 * normal(rng) : p.mu2 + p.sigma2 * normal(rng);
    const double s = 1.0 / (1.0 + std::exp(-p.beta * (x - mid)));
    if (s > p.tau) {
      ++pos;
    } else if (s < 1.0 - p.tau) {
      ++neg;
    }
  }
  const double inv = 1.0 / static_cast<double>(n_samples);
  PseudoLabelDist d;
  d.p_class.resize(2);
  d.p_class << pos * inv, neg * inv;
  d.p_mask = static_cast<double>(n_samples - pos - neg) * inv;
  return d;
}

PseudoLabelDist mc_cpd_multiclass(const Vector& mu, const Vector& sigma, double beta, double tau,
                                  std::int64_t n_samples, std::uint64_t seed) {
  const auto classes = mu.size();
  if (sigma.size() != classes) throw Error(ErrorKind::Shape, "sigma length != class count");
  if (n_samples < 1) throw Error(ErrorKind::InvalidInput, "need at least one sample");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  std::vector<std::int64_t> counts(static_cast<std::size_t>(classes), 0);
  std::int64_t masked = 0;
  Vector logits(classes);
  for (std::int64_t n = 0; n < n_samples; ++n) {
    for (Eigen::Index i = 0; i < classes; ++i) logits(i) = mu(i) + sigma(i) * normal(rng);
    const Vector s = softmax_scaled(logits, beta);
    const int c = argmax_class(s);
    if (s(c) > tau) {
      ++counts[static_cast<std::size_t>(c)];
    } else {
      ++masked;
    }
  }
  const double inv = 1.0 / static_cast<double>(n_samples);
  PseudoLabelDist d;
  d.p_class.resize(classes);
  for (Eigen::Index i = 0; i < classes; ++i) d.p_class(i) = counts[static_cast<std::size_t>(i)] * inv;
  d.p_mask = masked * inv;
  return d;
}

double recommended_init_threshold(const Vector& mu, double beta) {
  if (mu.size() < 2) throw Error(ErrorKind::Domain, "need at least two classes");
  double lowest = 1.0;
  for (Eigen::Index c = 0; c < mu.size(); ++c) {
    double ratio_sum = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      if (i != c) ratio_sum += std::exp(beta * (mu(i) - mu(c)));
    }
    lowest = std::min(lowest, 1.0 / (ratio_sum + 1.0));
  }
  return lowest;
}

std::vector<TheoryGridRow> run_theory_grid(std::int64_t n_samples, std::uint64_t seed) {
  std::vector<TheoryGridRow> rows;
  std::uint64_t point = 0;
  for (double gap : {1.0, 2.0, 4.0}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      for (double tau : {0.6, 0.8, 0.95}) {
        BinaryCpdParams p{gap / 2.0, -gap / 2.0, sigma, sigma, 1.0, tau};
        TheoryGridRow row;
        row.mu_gap = gap;
        row.sigma = sigma;
        row.tau = tau;
        row.beta = p.beta;
        row.analytic = binary_cpd(p);
        row.monte_carlo = mc_cpd_binary(p, n_samples, seed + 7919 * point++);
        row.max_abs_dev = std::max({std::abs(row.analytic.p_pos() - row.monte_carlo.p_pos()),
                                    std::abs(row.analytic.p_neg() - row.monte_carlo.p_neg()),
                                    std::abs(row.analytic.p_mask - row.monte_carlo.p_mask)});
        rows.push_back(row);
      }
    }
  }
  return rows;
}

namespace {

template <typename Vary>
MonotonicityReport scan(const std::vector<double>& grid, bool non_decreasing, double slack, Vary&& make) {
  MonotonicityReport r;
  double prev = binary_cpd(make(grid.front())).p_mask;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = binary_cpd(make(grid[i])).p_mask;
    const double excess = non_decreasing ? prev - cur : cur - prev;
    ++r.checks;
    if (excess > slack) {
      ++r.violations;
      r.worst_violation = std::max(r.worst_violation, excess);
    }
    prev = cur;
  }
  return r;
}

}  // namespace

MonotonicityReport check_mask_monotone_in_tau(const BinaryCpdParams& base, double slack) {
  std::vector<double> grid;
  for (int k = 51; k <= 99; ++k) grid.push_back(k / 100.0);
  return scan(grid, true, slack, [&](double tau) {
    BinaryCpdParams p = base;
    p.tau = tau;
    return p;
  });
}

MonotonicityReport check_mask_monotone_in_beta(const BinaryCpdParams& base, double slack) {
  std::vector<double> grid;
  for (double beta = 0.1; beta <= 50.0; beta *= 1.25) grid.push_back(beta);
  return scan(grid, false, slack, [&](double beta) {
    BinaryCpdParams p = base;
    p.beta = beta;
    return p;
  });
}

MonotonicityReport check_mask_monotone_in_gap(const BinaryCpdParams& base, double slack) {
  std::vector<double> grid;
  for (int k = 1; k <= 32; ++k) grid.push_back(0.25 * k);
  const double center = (base.mu1 + base.mu2) / 2.0;
  return scan(grid, false, slack, [&](double gap) {
    BinaryCpdParams p = base;
    p.mu1 = center + gap / 2.0;
    p.mu2 = center - gap / 2.0;
    return p;
  });
}

}  // namespace plf
