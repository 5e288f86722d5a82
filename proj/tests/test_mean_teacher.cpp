#include <gtest/gtest.h>

#include <cmath>

#include "plf/errors.hpp"
#include "plf/mean_teacher.hpp"

namespace plf {
namespace {

ModelParams filled(double v) {
  ModelParams p = ModelParams::zeros(3, 2);
  p.weights.setConstant(v);
  p.bias.setConstant(v);
  return p;
}

TEST(TeacherEma, MomentumLimitsAndArithmetic) {
  const ModelParams student = filled(0.0);
  EXPECT_TRUE(teacher_ema_update({filled(1.0), 1.0}, student).params.weights == filled(1.0).weights);
  EXPECT_TRUE(teacher_ema_update({filled(1.0), 0.0}, student).params.weights == student.weights);

  const TeacherState t = teacher_ema_update({filled(1.0), 0.9}, student);
  EXPECT_DOUBLE_EQ(t.params.weights(0, 0), 0.9);
  EXPECT_DOUBLE_EQ(t.params.bias(2), 0.9);
  EXPECT_DOUBLE_EQ(t.momentum, 0.9);
}

TEST(TeacherEma, ShapeMismatch) {
  try {
    teacher_ema_update({ModelParams::zeros(2, 2), 0.9}, ModelParams::zeros(3, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Shape);
  }
}

TEST(TeacherEma, ContractsTowardFrozenStudent) {
  ModelParams teacher = ModelParams::zeros(4, 3), student = ModelParams::zeros(4, 3);
  teacher.weights.setRandom();
  teacher.bias.setRandom();
  student.weights.setRandom();
  student.bias.setRandom();
  const double m = 0.9;
  const Matrix start = teacher.weights - student.weights;

  TeacherState t{teacher, m};
  for (int k = 1; k <= 50; ++k) {
    const Matrix before = t.params.weights - student.weights;
    t = teacher_ema_update(t, student);
    const Matrix after = t.params.weights - student.weights;
    EXPECT_LE((after.cwiseAbs() - m * before.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((after - std::pow(m, k) * start).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PerturbWeak, IdentityAndDeterminism) {
  const Vector x = Vector::LinSpaced(6, -1.0, 1.0);
  Rng rng(1);
  EXPECT_TRUE(perturb_weak(x, {0.0, 0.2, 0.1}, rng) == x);

  Rng a(9), b(9);
  EXPECT_TRUE(perturb_weak(x, {}, a) == perturb_weak(x, {}, b));
}

TEST(PerturbWeak, UnbiasedOverManyDraws) {
  const Vector x = Vector::LinSpaced(4, -2.0, 3.0);
  const PerturbConfig cfg{};
  Rng rng(17);
  const int n = 100000;
  Vector sum = Vector::Zero(4);
  for (int i = 0; i < n; ++i) sum += perturb_weak(x, cfg, rng);
  const Vector mean = sum / n;
  const double bound = 3.0 * cfg.weak_noise_std / std::sqrt(static_cast<double>(n));
  EXPECT_LE((mean - x).cwiseAbs().maxCoeff(), bound);
}

TEST(PerturbStrong, Limits) {
  const Vector x = Vector::LinSpaced(5, 1.0, 5.0);
  Rng rng(2);
  EXPECT_TRUE(perturb_strong(x, {0.0, 0.0, 0.0}, rng) == x);
  EXPECT_TRUE(perturb_strong(x, {0.0, 0.2, 1.0}, rng).isZero(0.0));
}

TEST(PerturbStrong, MaskFractionMatchesProbability) {
  const Vector x = Vector::Ones(10);
  const PerturbConfig cfg{0.0, 0.0, 0.1};
  Rng rng(5);
  const int n = 100000;
  long zeros = 0;
  for (int i = 0; i < n; ++i) zeros += (perturb_strong(x, cfg, rng).array() == 0.0).count();
  const double total = 10.0 * n;
  const double frac = zeros / total;
  EXPECT_NEAR(frac, 0.1, 3.0 * std::sqrt(0.1 * 0.9 / total));
}

TEST(PerturbBatch, RowsMatchVectorCalls) {
  Matrix x(3, 4);
  x.setRandom();
  const PerturbConfig cfg{};
  Rng a(4), b(4);
  const Matrix batch = perturb_strong(x, cfg, a);
  for (int r = 0; r < 3; ++r) {
    const Vector row = perturb_strong(Vector(x.row(r).transpose()), cfg, b);
    EXPECT_TRUE(batch.row(r).transpose() == row);
  }
}

TEST(PerturbConfig, Validation) {
  EXPECT_NO_THROW(validate(PerturbConfig{}));
  EXPECT_THROW(validate(PerturbConfig{0.3, 0.2, 0.1}), Error);
  EXPECT_THROW(validate(PerturbConfig{0.05, 0.2, 1.5}), Error);
}

}  // namespace
}  // namespace plf
