#pragma once

#include <vector>

#include "pinchlab/norms.hpp"
#include "pinchlab/pinching.hpp"

namespace pinchlab {

/// a = sum_i lambda_i p_i with distinct nonzero lambda_i; p_0 is the kernel.
struct NormalOperatorSpec {
  std::vector<Complex> eigenvalues;  // lambda_1..lambda_w
  std::vector<int> multiplicities;
  int kernel_rank = 0;
  ProjectionFamily fam;

  /// lambda_i, with lambda_0 = 0.
  Complex eigenvalue(int i) const;
  Matrix reconstruct() const;
};

/// Diagonal operator with the given eigenvalues and multiplicities on coordinate
/// blocks, followed by a kernel of rank `kernel_rank`.
NormalOperatorSpec diagonal_spec(const std::vector<Complex>& eigenvalues, const std::vector<int>& multiplicities,
                                 int kernel_rank = 0);

/// Eigenprojections of a normal matrix, blocks ordered by decreasing |lambda|.
/// Throws NotNormal when ||a a* - a* a|| > 1e-10 max(1, ||a||^2).
NormalOperatorSpec spectral_family(const Matrix& a, double tol_cluster = 1e-8);

struct GapEntry {
  int i = 0;
  int j = 0;
  double lhs = 0.0;       // ||p_i u p_j||_Phi
  double rhs = 0.0;       // ||u a - a u||_Phi / |lambda_i - lambda_j|
  double residual = 0.0;  // max entry of p_i (u a - a u) p_j - (lambda_j - lambda_i) p_i u p_j
};

struct GapReport {
  std::vector<GapEntry> entries;
  double max_residual = 0.0;
  double max_ratio = 0.0;  // max lhs / rhs over entries with rhs > 0
  bool holds = true;       // lhs <= rhs + 1e-10 everywhere
};

/// Checks the eigenvalue-gap inequality for all ordered pairs i != j in 0..w
/// (block 0 only when the kernel is nonzero).
GapReport gap_inequality_check(const NormalOperatorSpec& spec, const UnitaryMatrix& u, const SymmetricNorm& norm);

enum class ZkScenario { GrowingW, TwoLargeBlocks };

struct ZkSystem {
  ProjectionFamily fam;
  SkewHermitian z;
  double a2k = 1.0;      // Phi(1, ..., 1) with 2k ones
  bool degenerate = false;  // a2k == 1: no gap between Phi and the operator norm
};

/// z_k = a_2k^{-1} sum_{i=1}^k (xi_{2i-1} xi_{2i}* - xi_{2i} xi_{2i-1}*) in C^n, so
/// ||z_k||_Phi = 1 and ||z_k||_op = 1 / a_2k. GrowingW uses 2k rank-one blocks;
/// TwoLargeBlocks pairs vectors across two rank-k blocks. Throws DimensionTooSmall when n < 2k.
ZkSystem gap_sequence_zk(Eigen::Index n, const SymmetricNorm& norm, int k, ZkScenario scenario);

/// u_n exchanging the first basis vectors of blocks n+1 and n+2 (identity elsewhere).
/// Throws IndexOutOfRange unless 0 <= n and n + 2 <= w.
UnitaryMatrix swap_sequence_un(const NormalOperatorSpec& spec, int n);

struct SwapRow {
  int n = 0;
  double gap = 0.0;          // |lambda_{n+1} - lambda_{n+2}|
  double a_disp_op = 0.0;    // ||u a u* - a||_op
  double a_disp_phi = 0.0;   // ||u a u* - a||_Phi
  double p_disp_lower = 0.0; // ||(Q - P)(xi xi*)||_Phi with xi the first vector of block n+1
  double p_disp_s2 = 0.0;    // super_norm_s2(Q - P)
};

std::vector<SwapRow> swap_table(const NormalOperatorSpec& spec, const SymmetricNorm& norm);

struct TopologyRow {
  int k = 0;
  double z_op = 0.0;
  double z_phi = 0.0;
  double displacement = 0.0;  // super_norm_s2 of e^{z_k} P e^{-z_k} - P
  double bound = 0.0;         // 2 ||e^{z_k} - 1||_op
  double bound_closed = 0.0;  // 2 (e^{||z_k||_op} - 1)
};

struct TopologyTable {
  std::vector<TopologyRow> rows;
  bool degenerate = false;
};

TopologyTable topology_gap_table(const SymmetricNorm& norm, int k_max, ZkScenario scenario);

}  // namespace pinchlab
