#pragma once

#include <optional>
#include <vector>

namespace plf {

// Evaluation-only statistics. These are the only functions that take ground-truth labels.

/// Kept count / N. Throws ErrorKind::EmptyBatch for an empty mask.
double filter_ratio(const std::vector<bool>& mask);

/// Fraction of kept rows whose pseudo-label matches the true label; nullopt when nothing is kept.
std::optional<double> quality(const std::vector<bool>& mask, const std::vector<int>& pseudo_labels,
                              const std::vector<int>& true_labels);

/// Fraction of mismatched predictions.
double error_rate(const std::vector<int>& predictions, const std::vector<int>& true_labels);

}  // namespace plf
