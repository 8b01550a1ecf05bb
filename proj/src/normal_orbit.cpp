#include "pinchlab/normal_orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pinchlab/errors.hpp"
#include "pinchlab/finsler.hpp"

namespace pinchlab {

Complex NormalOperatorSpec::eigenvalue(int i) const {
  if (i == 0) return Complex(0.0);
  if (i < 0 || i > static_cast<int>(eigenvalues.size())) {
    throw IndexOutOfRange("eigenvalue " + std::to_string(i) + " not in 0.." + std::to_string(eigenvalues.size()));
  }
  return eigenvalues[static_cast<std::size_t>(i - 1)];
}

Matrix NormalOperatorSpec::reconstruct() const {
  Matrix a = Matrix::Zero(fam.dim(), fam.dim());
  for (int i = 1; i <= fam.block_count(); ++i) a += eigenvalue(i) * fam.projector(i);
  return a;
}

NormalOperatorSpec diagonal_spec(const std::vector<Complex>& eigenvalues, const std::vector<int>& multiplicities,
                                 int kernel_rank) {
  if (eigenvalues.size() != multiplicities.size()) throw InvalidArgument("one multiplicity per eigenvalue");
  if (kernel_rank < 0) throw InvalidArgument("kernel rank must be nonnegative");
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (std::abs(eigenvalues[i]) == 0.0) throw InvalidArgument("eigenvalues must be nonzero");
    for (std::size_t j = 0; j < i; ++j)
      if (eigenvalues[i] == eigenvalues[j]) throw InvalidArgument("eigenvalues must be distinct");
  }
  const int n = std::accumulate(multiplicities.begin(), multiplicities.end(), 0) + kernel_rank;
  return NormalOperatorSpec{eigenvalues, multiplicities, kernel_rank, ProjectionFamily::coordinate(n, multiplicities)};
}

NormalOperatorSpec spectral_family(const Matrix& a, double tol_cluster) {
  require_square(a, "normal operator");
  const Eigen::Index n = a.rows();
  const double scale = std::max(1.0, op_norm(a));
  if (op_norm(a * a.adjoint() - a.adjoint() * a) > 1e-10 * scale * scale) {
    throw NotNormal("a a* - a* a is not zero");
  }
  Eigen::ComplexSchur<Matrix> schur(a);
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    const double ax = std::abs(t(x, x)), ay = std::abs(t(y, y));
    if (std::abs(ax - ay) > tol_cluster * scale) return ax > ay;
    return std::arg(t(x, x)) < std::arg(t(y, y));
  });

  const double tol = tol_cluster * scale;
  std::vector<std::vector<Eigen::Index>> clusters;
  std::vector<Complex> centers;
  std::vector<Eigen::Index> kernel;
  for (Eigen::Index idx : order) {
    const Complex lambda = t(idx, idx);
    if (std::abs(lambda) <= tol) {
      kernel.push_back(idx);
      continue;
    }
    bool placed = false;
    for (std::size_t c = 0; c < clusters.size() && !placed; ++c) {
      if (std::abs(lambda - centers[c]) <= tol) {
        clusters[c].push_back(idx);
        placed = true;
      }
    }
    if (!placed) {
      clusters.push_back({idx});
      centers.push_back(lambda);
    }
  }

  NormalOperatorSpec spec{{}, {}, static_cast<int>(kernel.size()), ProjectionFamily::coordinate(n, {})};
  std::vector<Matrix> frames;
  for (const auto& cluster : clusters) {
    Matrix f(n, static_cast<Eigen::Index>(cluster.size()));
    Complex mean(0.0);
    for (std::size_t c = 0; c < cluster.size(); ++c) {
      f.col(static_cast<Eigen::Index>(c)) = q.col(cluster[c]);
      mean += t(cluster[c], cluster[c]);
    }
    frames.push_back(f);
    spec.eigenvalues.push_back(mean / static_cast<double>(cluster.size()));
    spec.multiplicities.push_back(static_cast<int>(cluster.size()));
  }
  spec.fam = ProjectionFamily::make(n, std::move(frames), 1e-9);
  if (max_abs(spec.reconstruct() - a) > 1e-9 * scale) {
    throw NotNormal("eigenprojections do not reconstruct the operator");
  }
  return spec;
}

GapReport gap_inequality_check(const NormalOperatorSpec& spec, const UnitaryMatrix& u, const SymmetricNorm& norm) {
  if (u.dim() != spec.fam.dim()) throw DimensionMismatch("unitary and operator dimensions differ");
  const Matrix a = spec.reconstruct();
  const Matrix comm = u.matrix() * a - a * u.matrix();
  const double comm_norm = ideal_norm(norm, comm);
  const int w = spec.fam.block_count();
  const int first = spec.kernel_rank > 0 ? 0 : 1;
  GapReport report;
  for (int i = first; i <= w; ++i) {
    const Matrix pi = spec.fam.projector(i);
    for (int j = first; j <= w; ++j) {
      if (i == j) continue;
      const Matrix pj = spec.fam.projector(j);
      const Complex diff = spec.eigenvalue(j) - spec.eigenvalue(i);
      const Matrix block = pi * u.matrix() * pj;
      GapEntry e;
      e.i = i;
      e.j = j;
      e.lhs = ideal_norm(norm, block);
      e.rhs = comm_norm / std::abs(diff);
      e.residual = max_abs(pi * comm * pj - diff * block);
      report.max_residual = std::max(report.max_residual, e.residual);
      if (e.rhs > 0.0) report.max_ratio = std::max(report.max_ratio, e.lhs / e.rhs);
      if (e.lhs > e.rhs + 1e-10) report.holds = false;
      report.entries.push_back(e);
    }
  }
  return report;
}

ZkSystem gap_sequence_zk(Eigen::Index n, const SymmetricNorm& norm, int k, ZkScenario scenario) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (n < 2 * k) throw DimensionTooSmall("z_k needs dimension >= " + std::to_string(2 * k) + ", got " + std::to_string(n));
  std::vector<int> sizes;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  if (scenario == ZkScenario::GrowingW) {
    sizes.assign(static_cast<std::size_t>(2 * k), 1);
    for (int i = 0; i < k; ++i) pairs.emplace_back(2 * i, 2 * i + 1);
  } else {
    sizes = {k, k};
    for (int i = 0; i < k; ++i) pairs.emplace_back(i, k + i);
  }
  const double a2k = phi_counting(norm, 2 * k);
  Matrix z = Matrix::Zero(n, n);
  for (const auto& [x, y] : pairs) {
    z(x, y) += 1.0 / a2k;
    z(y, x) -= 1.0 / a2k;
  }
  return ZkSystem{ProjectionFamily::coordinate(n, sizes), SkewHermitian(z), a2k, a2k <= 1.0 + 1e-12};
}

UnitaryMatrix swap_sequence_un(const NormalOperatorSpec& spec, int n) {
  const int w = spec.fam.block_count();
  if (n < 0 || n + 2 > w) {
    throw IndexOutOfRange("swap index " + std::to_string(n) + " needs blocks n+1, n+2 within 1.." + std::to_string(w));
  }
  const Vector x1 = spec.fam.frame(n + 1).col(0);
  const Vector x2 = spec.fam.frame(n + 2).col(0);
  Matrix u = identity(spec.fam.dim()) - x1 * x1.adjoint() - x2 * x2.adjoint() + x2 * x1.adjoint() + x1 * x2.adjoint();
  return UnitaryMatrix(u, 1e-10);
}

std::vector<SwapRow> swap_table(const NormalOperatorSpec& spec, const SymmetricNorm& norm) {
  const Matrix a = spec.reconstruct();
  std::vector<SwapRow> rows;
  for (int n = 0; n + 2 <= spec.fam.block_count(); ++n) {
    const UnitaryMatrix u = swap_sequence_un(spec, n);
    const Matrix disp = u.matrix() * a * u.matrix().adjoint() - a;
    const OrbitPoint q = OrbitPoint::from_unitary(spec.fam, u);
    const SuperOperator diff = q.as_super() - SuperOperator::pinch(spec.fam);
    const Vector xi = spec.fam.frame(n + 1).col(0);
    const Matrix witness = xi * xi.adjoint();
    SwapRow row;
    row.n = n;
    row.gap = std::abs(spec.eigenvalue(n + 1) - spec.eigenvalue(n + 2));
    row.a_disp_op = op_norm(disp);
    row.a_disp_phi = ideal_norm(norm, disp);
    row.p_disp_lower = ideal_norm(norm, diff.apply(witness)) / ideal_norm(norm, witness);
    row.p_disp_s2 = orbit_gap_s2(q, OrbitPoint::at_base(spec.fam));
    rows.push_back(row);
  }
  return rows;
}

TopologyTable topology_gap_table(const SymmetricNorm& norm, int k_max, ZkScenario scenario) {
  if (k_max < 1) throw InvalidArgument("k_max must be >= 1");
  TopologyTable table;
  for (int k = 1; k <= k_max; ++k) {
    const ZkSystem sys = gap_sequence_zk(2 * k, norm, k, scenario);
    const UnitaryMatrix e = expm_skew(sys.z);
    TopologyRow row;
    row.k = k;
    row.z_op = op_norm(sys.z.matrix());
    row.z_phi = ideal_norm(norm, sys.z.matrix());
    row.displacement = orbit_gap_s2(OrbitPoint::from_unitary(sys.fam, e), OrbitPoint::at_base(sys.fam));
    row.bound = 2.0 * op_norm(e.matrix() - identity(e.dim()));
    row.bound_closed = 2.0 * (std::exp(row.z_op) - 1.0);
    table.degenerate = table.degenerate || sys.degenerate;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace pinchlab
