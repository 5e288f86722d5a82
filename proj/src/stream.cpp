#include "plf/stream.hpp"

#include <cmath>
#include <numbers>

#include "plf/errors.hpp"

namespace plf {

bool operator==(const DomainSpec& a, const DomainSpec& b) {
  return a.class_means.rows() == b.class_means.rows() && a.class_means.cols() == b.class_means.cols() &&
         a.class_means == b.class_means && a.class_stddev == b.class_stddev && a.label_prior == b.label_prior;
}

ShiftKind parse_shift_kind(std::string_view name) {
  if (name == "mean-translation") return ShiftKind::MeanTranslation;
  if (name == "stddev-inflation") return ShiftKind::StddevInflation;
  if (name == "rotation") return ShiftKind::Rotation;
  throw Error(ErrorKind::Config, "unknown shift kind '" + std::string(name) + "'");
}

std::string_view to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::MeanTranslation: return "mean-translation";
    case ShiftKind::StddevInflation: return "stddev-inflation";
    case ShiftKind::Rotation: return "rotation";
  }
  return "?";
}

void validate(const DomainSpec& spec) {
  const auto c = spec.class_means.rows();
  if (c < 2) throw Error(ErrorKind::Config, "domain needs at least two classes");
  if (spec.class_stddev.size() != c || spec.label_prior.size() != c) {
    throw Error(ErrorKind::Shape, "domain stddev/prior length must equal class count");
  }
  if (!spec.class_means.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite class mean");
  if ((spec.class_stddev.array() < 0.0).any()) throw Error(ErrorKind::InvalidInput, "negative class stddev");
  if ((spec.label_prior.array() < 0.0).any() || std::abs(spec.label_prior.sum() - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidInput, "label prior is not a probability vector");
  }
}

Matrix random_orthogonal(int dim, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

DomainSpec make_source_domain(int classes, int dim, double separation, std::uint64_t seed) {
  if (classes < 2) throw Error(ErrorKind::Config, "need at least two classes");
  if (dim < 1) throw Error(ErrorKind::Config, "feature dimension must be positive");
  if (!(separation > 0.0)) throw Error(ErrorKind::Config, "separation must be positive");
  if (classes > dim + 1) {
    throw Error(ErrorKind::Capacity, std::to_string(classes) + " equidistant means do not fit in " +
                                         std::to_string(dim) + " dimensions");
  }

  // Centered standard basis vectors form a regular simplex with edge sqrt(2).
  Matrix centered = Matrix::Identity(classes, classes);
  centered.rowwise() -= Eigen::RowVectorXd::Constant(classes, 1.0 / classes);
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  Matrix coords = centered * svd.matrixV().leftCols(classes - 1);  // C x (C-1)

  Matrix embedded = Matrix::Zero(classes, dim);
  embedded.leftCols(classes - 1) = coords * (separation / std::numbers::sqrt2);

  Rng rng(seed);
  DomainSpec spec;
  spec.class_means = embedded * random_orthogonal(dim, rng).transpose();
  spec.class_stddev = Vector::Ones(classes);
  spec.label_prior = Vector::Constant(classes, 1.0 / classes);
  return spec;
}

DomainSpec shift_domain(const DomainSpec& base, double severity, ShiftKind kind, std::uint64_t seed) {
  if (!(severity >= 0.0)) throw Error(ErrorKind::Config, "severity must be non-negative");
  if (severity == 0.0) return base;

  Rng rng(seed);
  std::normal_distribution<double> normal;
  const int d = base.dim();
  DomainSpec out = base;

  auto random_unit = [&] {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = normal(rng);
    return Vector(v / v.norm());
  };

  switch (kind) {
    case ShiftKind::MeanTranslation: {
      const Vector dir = random_unit();
      out.class_means.rowwise() += severity * dir.transpose();
      break;
    }
    case ShiftKind::StddevInflation:
      out.class_stddev *= (1.0 + severity);
      break;
    case ShiftKind::Rotation: {
      if (d < 2) throw Error(ErrorKind::Config, "rotation needs at least two feature dimensions");
      Vector u = random_unit();
      Vector v = random_unit();
      v -= v.dot(u) * u;
      v.normalize();
      const double angle = severity * std::numbers::pi / 10.0;
      // R = I + (cos - 1)(uu' + vv') + sin (vu' - uv')
      Matrix r = Matrix::Identity(d, d);
      r += (std::cos(angle) - 1.0) * (u * u.transpose() + v * v.transpose());
      r += std::sin(angle) * (v * u.transpose() - u * v.transpose());
      out.class_means = base.class_means * r.transpose();
      break;
    }
  }
  return out;
}

SampleBatch sample_batch(const DomainSpec& spec, int batch_size, Rng& rng) {
  if (batch_size < 1) throw Error(ErrorKind::EmptyBatch, "batch size must be positive");
  const int d = spec.dim();
  std::discrete_distribution<int> label_dist(spec.label_prior.data(), spec.label_prior.data() + spec.classes());
  std::normal_distribution<double> normal;

  SampleBatch out;
  out.features.resize(batch_size, d);
  out.true_labels.resize(batch_size);
  for (int b = 0; b < batch_size; ++b) {
    const int y = label_dist(rng);
    out.true_labels[b] = y;
    const double sigma = spec.class_stddev(y);
    for (int j = 0; j < d; ++j) out.features(b, j) = spec.class_means(y, j) + sigma * normal(rng);
  }
  return out;
}

}  // namespace plf
