#include <gtest/gtest.h>

#include <cmath>

#include "pinchlab/block_permutation.hpp"
#include "pinchlab/experiments.hpp"
#include "pinchlab/pinching.hpp"
#include "test_support.hpp"

namespace pinchlab {
namespace {

using test::mat2;
using test::unit_vectors;

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

TEST(Family, FullFrameHasNoComplement) {
  const ProjectionFamily fam = ProjectionFamily::make(3, {identity(3)});
  EXPECT_EQ(fam.block_count(), 1);
  EXPECT_EQ(fam.p0_rank(), 0);
  EXPECT_EQ(fam.complement_frame().cols(), 0);
}

TEST(Family, SingleVectorInC2) {
  const ProjectionFamily fam = ProjectionFamily::make(2, {unit_vectors(2, {0})});
  EXPECT_EQ(fam.block_count(), 1);
  EXPECT_EQ(fam.p0_rank(), 1);
  EXPECT_LT(max_abs(fam.projector(0) - mat2(0, 0, 0, 1)), 1e-15);
}

TEST(Family, Errors) {
  EXPECT_THROW(ProjectionFamily::make(2, {unit_vectors(2, {0}), unit_vectors(2, {0})}), NotOrthogonal);
  EXPECT_THROW(ProjectionFamily::make(2, {mat2(1, 1, 0, 1)}), NotOrthogonal);
  EXPECT_THROW(ProjectionFamily::make(2, {unit_vectors(3, {0})}), DimensionMismatch);
  const std::vector<int> sizes{2, 2};
  EXPECT_THROW(ProjectionFamily::coordinate(3, sizes), OverComplete);
  const ProjectionFamily fam = ProjectionFamily::make(2, {unit_vectors(2, {0})});
  EXPECT_THROW(fam.frame(2), IndexOutOfRange);
}

TEST(Family, AdaptedBasisIsUnitary) {
  Rng rng(2);
  const ProjectionFamily fam = random_family(rng, 6, {2, 1});
  const Matrix b = fam.adapted_basis();
  EXPECT_LT(max_abs(b.adjoint() * b - identity(6)), 1e-12);
  Matrix total = Matrix::Zero(6, 6);
  for (int i = 0; i <= fam.block_count(); ++i) total += fam.projector(i);
  EXPECT_LT(max_abs(total - identity(6)), 1e-12);
}

TEST(Pinch, RankOneBlock) {
  const ProjectionFamily fam = ProjectionFamily::make(2, {unit_vectors(2, {0})});
  EXPECT_LT(max_abs(pinch(fam, mat2(1, 2, 3, 4)) - mat2(1, 0, 0, 0)), 1e-15);
}

TEST(Pinch, Axioms) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const ProjectionFamily fam = random_family(rng, 5, random_sizes(rng, 5));
    const Matrix x = rng.gaussian(5, 5);
    const Matrix y = rng.gaussian(5, 5);
    const Matrix px = pinch(fam, x);
    EXPECT_LT(max_abs(pinch(fam, px) - px), 1e-12);
    EXPECT_NEAR(std::abs((pinch(fam, x).adjoint() * y).trace() - (x.adjoint() * pinch(fam, y)).trace()), 0.0, 1e-10);
    for (const auto& norm : builtin_norms()) EXPECT_LE(ideal_norm(norm, px), ideal_norm(norm, x) + 1e-10);
    EXPECT_NEAR(super_norm_s2(SuperOperator::pinch(fam)), 1.0, 1e-9);
  }
}

TEST(SuperOperator, BasicAlgebra) {
  Rng rng(22);
  const ProjectionFamily fam = random_family(rng, 4, {1, 2});
  const Matrix y = rng.gaussian(4, 4);
  const SuperOperator id = SuperOperator::identity(4);
  const SuperOperator p = SuperOperator::pinch(fam);
  EXPECT_LT(max_abs(id.apply(y) - y), 1e-15);
  EXPECT_LT(max_abs(p.apply(y) - pinch(fam, y)), 1e-15);
  EXPECT_LT(max_abs((p - p).apply(y)), 1e-15);
  const Matrix a = rng.gaussian(4, 4);
  const Matrix b = rng.gaussian(4, 4);
  const SuperOperator s = SuperOperator::left(a) * p * SuperOperator::right(b) + p * Complex(0.0, 2.0);
  EXPECT_LT(max_abs(s.apply(y) - (a * pinch(fam, y * b) + Complex(0.0, 2.0) * pinch(fam, y))), 1e-12);
  EXPECT_LT(max_abs(s.matricize() * vec(y) - vec(s.apply(y))), 1e-12);
  const Matrix x = rng.gaussian(4, 4);
  EXPECT_NEAR(std::abs((s.apply(x).adjoint() * y).trace() - (x.adjoint() * s.adjoint().apply(y)).trace()), 0.0,
              1e-10);
  EXPECT_THROW(id + SuperOperator::identity(3), DimensionMismatch);
}

TEST(Commutator, BlockDiagonalAndScalarGiveZero) {
  Rng rng(23);
  const ProjectionFamily fam = random_family(rng, 5, {1, 2});
  const SkewHermitian d = test::block_diagonal_skew(fam, rng);
  EXPECT_LT(basis_discrepancy(commutator_super(d.matrix(), fam), SuperOperator::zero(5)), 1e-12);
  EXPECT_LT(basis_discrepancy(commutator_super(Complex(0.0, 3.0) * identity(5), fam), SuperOperator::zero(5)), 1e-12);
}

TEST(Commutator, TwoByTwoExample) {
  const ProjectionFamily fam = ProjectionFamily::make(2, {unit_vectors(2, {0})});
  const Matrix z = mat2(0, 1, -1, 0);
  const SuperOperator s = commutator_super(z, fam);
  const SuperOperator expected = SuperOperator::left(mat2(0, -1, -1, 0)) * SuperOperator::right(fam.projector(1));
  EXPECT_LT(basis_discrepancy(s, expected), 1e-15);
  EXPECT_NEAR(super_norm_s2(s), 1.0, 1e-12);
}

TEST(SuperNorm, IdentityAndPinch) {
  Rng rng(24);
  EXPECT_NEAR(super_norm_s2(SuperOperator::identity(3)), 1.0, 1e-12);
  EXPECT_NEAR(super_norm_s2(SuperOperator::pinch(random_family(rng, 4, {1}))), 1.0, 1e-12);
  EXPECT_THROW(super_norm_s2(SuperOperator::identity(9), 8), DimensionTooLarge);
}

TEST(SuperNormEstimate, Identity) {
  for (const auto& norm : builtin_norms()) {
    const NormEstimate e = super_norm_estimate(SuperOperator::identity(3), norm, 2, 1);
    EXPECT_NEAR(e.lower, 1.0, 1e-12) << norm.name();
    EXPECT_NEAR(ideal_norm(norm, e.witness), 1.0, 1e-12);
  }
  EXPECT_THROW(super_norm_estimate(SuperOperator::identity(3), SymmetricNorm::op(), 0, 1), InvalidArgument);
}

// For x = e2 e1* (the matrix [[0,0],[1,0]]) the nonzero off-diagonal corner is
// p0 x p1; p1 x p0 vanishes. The commutator bound is attained through p0 x p1.
TEST(SuperNormEstimate, LowerTriangularCornerOrientation) {
  const ProjectionFamily fam = ProjectionFamily::make(2, {unit_vectors(2, {0})});
  const Matrix x = mat2(0, 0, 1, 0);
  EXPECT_LT(max_abs(fam.projector(1) * x * fam.projector(0)), 1e-15);
  EXPECT_NEAR(op_norm(fam.projector(0) * x * fam.projector(1)), 1.0, 1e-15);
  const NormEstimate e = super_norm_estimate(commutator_super(x, fam), SymmetricNorm::schatten(1), 2, 3);
  EXPECT_GE(e.lower, 1.0 - 1e-10);
  const Matrix image = commutator_super(x, fam).apply(e.witness);
  EXPECT_NEAR(ideal_norm(SymmetricNorm::schatten(1), image), e.lower, 1e-10);
}

TEST(SuperNormEstimate, MatchesExactS2) {
  Rng rng(25);
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Index n = rng.uniform_int(2, 8);
    const ProjectionFamily fam = random_family(rng, n, random_sizes(rng, n));
    const SuperOperator s = SuperOperator::left(rng.gaussian(n, n)) * SuperOperator::pinch(fam) *
                            SuperOperator::right(rng.gaussian(n, n));
    const double exact = super_norm_s2(s);
    const NormEstimate e = super_norm_estimate(s, SymmetricNorm::schatten(2), 4, 100 + trial);
    EXPECT_LE(e.lower, exact + 1e-10);
    EXPECT_NEAR(e.lower, exact, 1e-6 * std::max(1.0, exact));
  }
}

// The block lower bound holds for every Phi; the bound by ||x (1 - p0)|| for x
// with zero diagonal blocks holds in the operator norm but not in S2.
TEST(CommutatorBound, CompactBoundFailsInS2) {
  const ProjectionFamily fam = ProjectionFamily::make(2, {unit_vectors(2, {0}), unit_vectors(2, {1})});
  const Matrix x = mat2(0, 1, 1, 0);
  const SuperOperator s = commutator_super(x, fam);
  EXPECT_NEAR(super_norm_s2(s), 1.0, 1e-12);
  EXPECT_NEAR(ideal_norm(SymmetricNorm::schatten(2), x), std::sqrt(2.0), 1e-15);
  const NormEstimate e = super_norm_estimate(s, SymmetricNorm::op(), 4, 5);
  EXPECT_GE(e.lower, op_norm(x) - 1e-10);
}

TEST(Orbit, ConjugateAction) {
  Rng rng(26);
  const ProjectionFamily fam = random_family(rng, 4, {1, 2});
  const OrbitPoint p = OrbitPoint::at_base(fam);
  const UnitaryMatrix u = rng.haar_unitary(4);
  const UnitaryMatrix v = rng.haar_unitary(4);
  EXPECT_LT(basis_discrepancy(conjugate(UnitaryMatrix::identity(4), p).as_super(), p.as_super()), 1e-14);
  EXPECT_LT(basis_discrepancy(conjugate(u, conjugate(v, p)).as_super(), conjugate(u * v, p).as_super()), 1e-10);
  const Matrix y = rng.gaussian(4, 4);
  Matrix expected = Matrix::Zero(4, 4);
  for (int i = 1; i <= fam.block_count(); ++i) {
    expected += u.matrix() * fam.projector(i) * u.matrix().adjoint() * y * fam.projector(i);
  }
  EXPECT_LT(max_abs(conjugate(u, p).as_super().apply(y) - expected), 1e-12);
}

TEST(PinchingEqual, Examples) {
  const Matrix e1 = unit_vectors(3, {0});
  const Matrix e23 = unit_vectors(3, {1, 2});
  const Matrix e2 = unit_vectors(3, {1});
  const Matrix e3 = unit_vectors(3, {2});
  const ProjectionFamily a = ProjectionFamily::make(3, {e1, e2, e3});
  ASSERT_TRUE(pinching_equal(a, a));
  EXPECT_TRUE(pinching_equal(a, a)->is_identity());
  const auto swapped = pinching_equal(a, ProjectionFamily::make(3, {e2, e1, e3}));
  ASSERT_TRUE(swapped);
  EXPECT_EQ(swapped->values(), (std::vector<int>{0, 2, 1, 3}));
  EXPECT_FALSE(pinching_equal(a, ProjectionFamily::make(3, {e1, e23})));
  const ProjectionFamily f1 = ProjectionFamily::make(2, {unit_vectors(2, {0})});
  const ProjectionFamily f2 = ProjectionFamily::make(2, {unit_vectors(2, {1})});
  EXPECT_FALSE(pinching_equal(f1, f2));
  EXPECT_GT(basis_discrepancy(SuperOperator::pinch(f1), SuperOperator::pinch(f2)), 0.5);
}

TEST(BlockPermutationTest, GroupLaws) {
  const BlockPermutation s = BlockPermutation::make({0, 2, 3, 1});
  EXPECT_TRUE(s.compose(s.inverse()).is_identity());
  EXPECT_EQ(s.compose(s).values(), (std::vector<int>{0, 3, 1, 2}));
  EXPECT_EQ(s.to_string(), "[0,2,3,1]");
  EXPECT_TRUE(BlockPermutation::identity(3).is_identity());
  EXPECT_THROW(BlockPermutation::make({1, 0}), InvalidArgument);
  EXPECT_THROW(BlockPermutation::make({0, 1, 1}), InvalidArgument);
  const std::vector<int> sizes{1, 2};
  const ProjectionFamily fam = ProjectionFamily::coordinate(3, sizes);
  EXPECT_THROW(BlockPermutation::make({0, 2, 1}, fam), RankMismatch);
  EXPECT_FALSE(BlockPermutation::make({0, 2, 1}).rank_compatible(fam));
}

}  // namespace
}  // namespace pinchlab
