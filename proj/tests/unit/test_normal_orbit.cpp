#include <gtest/gtest.h>

#include <cmath>

#include "pinchlab/finsler.hpp"
#include "pinchlab/normal_orbit.hpp"
#include "test_support.hpp"

namespace pinchlab {
namespace {

TEST(SpectralFamily, RepeatedEigenvalueAndKernel) {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  const NormalOperatorSpec spec = spectral_family(a);
  ASSERT_EQ(spec.eigenvalues.size(), 1u);
  EXPECT_NEAR(std::abs(spec.eigenvalues[0] - 1.0), 0.0, 1e-12);
  EXPECT_EQ(spec.multiplicities[0], 2);
  EXPECT_EQ(spec.kernel_rank, 1);
  EXPECT_LT(max_abs(spec.reconstruct() - a), 1e-12);
}

TEST(SpectralFamily, DistinctEigenvalues) {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0 / 3.0;
  a(1, 1) = 1.0;
  a(2, 2) = 0.5;
  const NormalOperatorSpec spec = spectral_family(a);
  ASSERT_EQ(spec.eigenvalues.size(), 3u);
  EXPECT_NEAR(spec.eigenvalues[0].real(), 1.0, 1e-12);
  EXPECT_NEAR(spec.eigenvalues[2].real(), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(spec.kernel_rank, 0);
  EXPECT_LT(max_abs(spec.reconstruct() - a), 1e-12);
}

TEST(SpectralFamily, RejectsNonNormal) { EXPECT_THROW(spectral_family(test::mat2(0, 1, 0, 0)), NotNormal); }

TEST(SpectralFamily, RandomNormalMatrix) {
  Rng rng(71);
  const Matrix u = rng.haar_unitary(4).matrix();
  Vector d(4);
  d << Complex(1, 1), Complex(0, -2), Complex(0.5, 0), Complex(0, 0);
  const Matrix a = u * d.asDiagonal() * u.adjoint();
  const NormalOperatorSpec spec = spectral_family(a);
  EXPECT_EQ(spec.eigenvalues.size(), 3u);
  EXPECT_EQ(spec.kernel_rank, 1);
  EXPECT_LT(max_abs(spec.reconstruct() - a), 1e-10);
}

TEST(GapInequality, IsotropyUnitaryHasNoOffDiagonalContent) {
  Rng rng(72);
  const NormalOperatorSpec spec = diagonal_spec({1.0, 0.5}, {1, 2}, 1);
  Matrix g = Matrix::Zero(4, 4);
  for (int i = 0; i <= spec.fam.block_count(); ++i) {
    const Matrix f = spec.fam.block_frame(i);
    g += f * rng.haar_unitary(f.cols()).matrix() * f.adjoint();
  }
  const GapReport r = gap_inequality_check(spec, UnitaryMatrix(g, 1e-10), SymmetricNorm::schatten(1));
  for (const auto& e : r.entries) EXPECT_LT(e.lhs, 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(GapInequality, RandomUnitaryOperatorNorm) {
  Rng rng(73);
  const NormalOperatorSpec spec = diagonal_spec({1.0, 0.5}, {1, 1});
  for (int trial = 0; trial < 10; ++trial) {
    const GapReport r = gap_inequality_check(spec, rng.haar_unitary(2), SymmetricNorm::op());
    EXPECT_TRUE(r.holds);
    EXPECT_LE(r.max_ratio, 1.0 + 1e-12);
    EXPECT_LT(r.max_residual, 1e-12);
  }
}

TEST(GapInequality, EqualityForSwap) {
  const NormalOperatorSpec spec = diagonal_spec({1.0, 0.5}, {1, 1});
  const GapReport r = gap_inequality_check(spec, UnitaryMatrix(test::mat2(0, 1, 1, 0)), SymmetricNorm::op());
  EXPECT_NEAR(r.max_ratio, 1.0, 1e-12);
}

TEST(GapInequality, IncludesKernelBlock) {
  Rng rng(74);
  const NormalOperatorSpec spec = diagonal_spec({Complex(1, 1), Complex(-0.5, 0)}, {1, 2}, 2);
  const GapReport r = gap_inequality_check(spec, rng.haar_unitary(5), SymmetricNorm::ky_fan(2));
  EXPECT_EQ(r.entries.size(), 6u);
  EXPECT_LT(r.max_residual, 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(Zk, Schatten1Construction) {
  const ZkSystem s = gap_sequence_zk(4, SymmetricNorm::schatten(1), 2, ZkScenario::GrowingW);
  EXPECT_NEAR(op_norm(s.z.matrix()), 0.25, 1e-14);
  EXPECT_NEAR(ideal_norm(SymmetricNorm::schatten(1), s.z.matrix()), 1.0, 1e-12);
  EXPECT_FALSE(s.degenerate);
  EXPECT_THROW(gap_sequence_zk(3, SymmetricNorm::schatten(1), 2, ZkScenario::GrowingW), DimensionTooSmall);
}

TEST(Zk, OperatorNormDegenerates) {
  const ZkSystem s = gap_sequence_zk(6, SymmetricNorm::op(), 3, ZkScenario::TwoLargeBlocks);
  EXPECT_TRUE(s.degenerate);
  EXPECT_NEAR(op_norm(s.z.matrix()), 1.0, 1e-14);
}

TEST(Zk, S2QuotientNormIsOneForRankOneBlocks) {
  const auto s2 = SymmetricNorm::schatten(2);
  for (int k = 1; k <= 4; ++k) {
    const ZkSystem s = gap_sequence_zk(2 * k, s2, k, ZkScenario::GrowingW);
    EXPECT_NEAR(quotient_norm(s.fam, s.z, s2).value, 1.0, 1e-12);
  }
}

TEST(Swap, FirstSwapOfDiagonalOperator) {
  const NormalOperatorSpec spec = diagonal_spec({1.0, 0.5, 1.0 / 3.0, 0.25}, {1, 1, 1, 1});
  const UnitaryMatrix u = swap_sequence_un(spec, 1);
  const Matrix a = spec.reconstruct();
  EXPECT_NEAR(op_norm(u.matrix() * a * u.matrix().adjoint() - a), 1.0 / 6.0, 1e-14);
  const auto rows = swap_table(spec, SymmetricNorm::schatten(1));
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.a_disp_op, r.gap, 1e-14);
    EXPECT_GE(r.p_disp_lower, 1.0 - 1e-9);
    EXPECT_GE(r.p_disp_s2, 1.0 - 1e-9);
  }
  EXPECT_THROW(swap_sequence_un(spec, 3), IndexOutOfRange);
  EXPECT_THROW(swap_sequence_un(spec, -1), IndexOutOfRange);
}

TEST(Topology, Schatten1TableIsMonotoneAndBounded) {
  const TopologyTable t = topology_gap_table(SymmetricNorm::schatten(1), 8, ZkScenario::GrowingW);
  EXPECT_FALSE(t.degenerate);
  ASSERT_EQ(t.rows.size(), 8u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    EXPECT_NEAR(r.z_phi, 1.0, 1e-12);
    EXPECT_NEAR(r.bound_closed, 2.0 * (std::exp(1.0 / (2.0 * r.k)) - 1.0), 1e-12);
    EXPECT_LE(r.displacement, r.bound + 1e-12);
    if (i > 0) EXPECT_LT(r.displacement, t.rows[i - 1].displacement);
  }
}

TEST(Topology, OperatorNormFlagged) {
  EXPECT_TRUE(topology_gap_table(SymmetricNorm::op(), 3, ZkScenario::GrowingW).degenerate);
}

}  // namespace
}  // namespace pinchlab
