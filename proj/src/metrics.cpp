#include "plf/metrics.hpp"

#include <cstddef>

#include "plf/errors.hpp"

namespace plf {

double filter_ratio(const std::vector<bool>& mask) {
  if (mask.empty()) throw Error(ErrorKind::EmptyBatch, "filter ratio of an empty mask");
  std::size_t kept = 0;
  for (bool k : mask) kept += k ? 1 : 0;
  return static_cast<double>(kept) / static_cast<double>(mask.size());
}

std::optional<double> quality(const std::vector<bool>& mask, const std::vector<int>& pseudo_labels,
                              const std::vector<int>& true_labels) {
  if (mask.size() != pseudo_labels.size() || mask.size() != true_labels.size()) {
    throw Error(ErrorKind::Shape, "mask, pseudo-label and label lengths differ");
  }
  std::size_t kept = 0, correct = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    ++kept;
    if (pseudo_labels[i] == true_labels[i]) ++correct;
  }
  if (kept == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(kept);
}

double error_rate(const std::vector<int>& predictions, const std::vector<int>& true_labels) {
  if (predictions.size() != true_labels.size()) throw Error(ErrorKind::Shape, "prediction and label lengths differ");
  if (predictions.empty()) throw Error(ErrorKind::EmptyBatch, "error rate of an empty batch");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) wrong += predictions[i] != true_labels[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(predictions.size());
}

}  // namespace plf
