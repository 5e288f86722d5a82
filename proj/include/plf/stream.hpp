#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "plf/numerics.hpp"

namespace plf {

using Rng = std::mt19937_64;

// Class-conditional Gaussian feature generator for one domain.
struct DomainSpec {
  Matrix class_means;  // C x d
  Vector class_stddev; // C
  Vector label_prior;  // C, sums to 1

  int classes() const { return static_cast<int>(class_means.rows()); }
  int dim() const { return static_cast<int>(class_means.cols()); }
};

bool operator==(const DomainSpec& a, const DomainSpec& b);

enum class ShiftKind { MeanTranslation, StddevInflation, Rotation };

ShiftKind parse_shift_kind(std::string_view name);
std::string_view to_string(ShiftKind kind);

struct StreamSchedule {
  std::vector<DomainSpec> domains;
  int steps_per_domain = 500;
  std::vector<double> severity_ramp;  // empty, or one entry per domain
};

// Features plus held-out labels. Only the metrics code reads true_labels.
struct SampleBatch {
  Matrix features;  // B x d
  std::vector<int> true_labels;
};

/// Places C means on a scaled regular simplex (pairwise distance exactly
/// `separation`), randomly rotated into R^d. Needs C <= d + 1.
DomainSpec make_source_domain(int classes, int dim, double separation, std::uint64_t seed);

/// severity == 0 returns `base` unchanged.
///   MeanTranslation: every mean moves by severity * (random unit vector).
///   StddevInflation: sigma_c *= 1 + severity.
///   Rotation: means rotate by severity * pi/10 radians in a random plane.
DomainSpec shift_domain(const DomainSpec& base, double severity, ShiftKind kind, std::uint64_t seed);

SampleBatch sample_batch(const DomainSpec& spec, int batch_size, Rng& rng);

/// Uniform random orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix random_orthogonal(int dim, Rng& rng);

void validate(const DomainSpec& spec);

}  // namespace plf
