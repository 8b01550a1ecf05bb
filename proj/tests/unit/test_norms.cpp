#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pinchlab/norms.hpp"
#include "pinchlab/random.hpp"
#include "test_support.hpp"

namespace pinchlab {
namespace {

TEST(PhiEval, BuiltinSequences) {
  const std::vector<double> a{3, 1, 2};
  EXPECT_DOUBLE_EQ(phi_eval(SymmetricNorm::op(), a), 3.0);
  const std::vector<double> ones{1, 1, 1};
  EXPECT_DOUBLE_EQ(phi_eval(SymmetricNorm::schatten(1), ones), 3.0);
  const std::vector<double> b{3, 2, 1};
  EXPECT_DOUBLE_EQ(phi_eval(SymmetricNorm::ky_fan(2), b), 5.0);
}

TEST(PhiEval, SymmetricUnderSignAndOrder) {
  const std::vector<double> a{-1, 3, 0.5};
  const std::vector<double> b{0.5, 1, -3};
  for (const auto& norm : builtin_norms()) EXPECT_NEAR(phi_eval(norm, a), phi_eval(norm, b), 1e-14) << norm.name();
}

TEST(IdealNorm, RankOneEqualsProductOfLengths) {
  Rng rng(4);
  const Vector xi = rng.unit_vector(5) * 2.0;
  const Vector eta = rng.unit_vector(5) * 0.75;
  for (const auto& norm : builtin_norms()) EXPECT_NEAR(ideal_norm(norm, xi * eta.adjoint()), 1.5, 1e-12) << norm.name();
}

TEST(IdealNorm, ZeroMatrix) {
  for (const auto& norm : builtin_norms()) EXPECT_EQ(ideal_norm(norm, Matrix::Zero(3, 3)), 0.0);
}

TEST(IdealNorm, DiagonalSchatten1) {
  EXPECT_NEAR(ideal_norm(SymmetricNorm::schatten(1), test::mat2(1, 0, 0, 0.5)), 1.5, 1e-14);
}

TEST(IdealNorm, UnitarilyInvariantAndDominatesOperatorNorm) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = rng.gaussian(5, 5);
    const Matrix u = rng.haar_unitary(5).matrix();
    const Matrix v = rng.haar_unitary(5).matrix();
    for (const auto& norm : builtin_norms()) {
      EXPECT_NEAR(ideal_norm(norm, u * x * v), ideal_norm(norm, x), 1e-10) << norm.name();
      EXPECT_GE(ideal_norm(norm, x), op_norm(x) - 1e-12) << norm.name();
    }
  }
}

TEST(PhiCounting, Values) {
  EXPECT_DOUBLE_EQ(phi_counting(SymmetricNorm::schatten(1), 4), 4.0);
  EXPECT_DOUBLE_EQ(phi_counting(SymmetricNorm::op(), 7), 1.0);
  EXPECT_DOUBLE_EQ(phi_counting(SymmetricNorm::ky_fan(2), 5), 2.0);
  EXPECT_NEAR(phi_counting(SymmetricNorm::schatten(2), 4), 2.0, 1e-15);
  EXPECT_THROW(phi_counting(SymmetricNorm::op(), 0), InvalidArgument);
}

TEST(Subgradient, SatisfiesDualityPairing) {
  Rng rng(12);
  const Matrix x = rng.gaussian(4, 4);
  for (const auto& norm : builtin_norms()) {
    const Matrix g = ideal_norm_subgradient(norm, x);
    EXPECT_NEAR((g.adjoint() * x).trace().real(), ideal_norm(norm, x), 1e-10) << norm.name();
    for (int k = 0; k < 5; ++k) {
      const Matrix y = rng.gaussian(4, 4);
      EXPECT_LE((g.adjoint() * y).trace().real(), ideal_norm(norm, y) + 1e-10) << norm.name();
    }
  }
}

TEST(Parse, Names) {
  EXPECT_TRUE(SymmetricNorm::parse("op").is_operator());
  EXPECT_TRUE(SymmetricNorm::parse("s2").is_schatten2());
  EXPECT_EQ(SymmetricNorm::parse("s1").name(), SymmetricNorm::schatten(1).name());
  EXPECT_EQ(SymmetricNorm::parse("kyfan:3").name(), SymmetricNorm::ky_fan(3).name());
  EXPECT_NEAR(phi_eval(SymmetricNorm::parse("sp:3"), std::vector<double>{1, 1}), std::cbrt(2.0), 1e-14);
}

TEST(Parse, Rejects) {
  EXPECT_THROW(SymmetricNorm::parse("frobenius"), InvalidNorm);
  EXPECT_THROW(SymmetricNorm::parse("kyfan:0"), InvalidNorm);
  EXPECT_THROW(SymmetricNorm::parse("sp:0.5"), InvalidNorm);
  EXPECT_THROW(SymmetricNorm::parse("kyfan:2x"), InvalidNorm);
}

TEST(Custom, AcceptsValidNorm) {
  const auto norm = SymmetricNorm::custom("max+half-sum", [](std::span<const double> s) {
    double total = 0.0;
    for (double v : s) total += v;
    return s.empty() ? 0.0 : (s[0] + 0.5 * total) / 1.5;
  });
  EXPECT_NEAR(phi_eval(norm, std::vector<double>{1.0}), 1.0, 1e-15);
  EXPECT_NEAR(phi_eval(norm, std::vector<double>{1.0, 1.0}), 4.0 / 3.0, 1e-15);
}

TEST(Custom, RejectsInvalidNorms) {
  EXPECT_THROW(SymmetricNorm::custom("double", [](std::span<const double> s) { return s.empty() ? 0.0 : 2 * s[0]; }),
               InvalidNorm);
  EXPECT_THROW(SymmetricNorm::custom("square",
                                     [](std::span<const double> s) {
                                       double t = 0;
                                       for (double v : s) t += v * v * v;
                                       return t;
                                     }),
               InvalidNorm);
  EXPECT_THROW(SymmetricNorm::custom("empty", nullptr), InvalidNorm);
}

}  // namespace
}  // namespace pinchlab
