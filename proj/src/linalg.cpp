#include "pinchlab/linalg.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pinchlab/random.hpp"

namespace pinchlab {

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> solver(m);
  return solver.singularValues()(0);
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

void require_square(const Matrix& m, const char* what, Eigen::Index n) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch(std::string(what) + " must be square, got " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()));
  }
  if (n >= 0 && m.rows() != n) {
    throw DimensionMismatch(std::string(what) + " has dimension " + std::to_string(m.rows()) +
                            ", expected " + std::to_string(n));
  }
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + " has non-finite entries");
}

// ---------------------------------------------------------------------------

SkewHermitian::SkewHermitian(Matrix m, double tol) : m_(std::move(m)) {
  require_square(m_, "skew-hermitian matrix");
  const double defect = max_abs(m_ + m_.adjoint());
  if (defect > tol) {
    throw InvalidArgument("matrix is not skew-hermitian (defect " + std::to_string(defect) + ")");
  }
}

SkewHermitian SkewHermitian::skew_part(const Matrix& m) {
  require_square(m, "matrix");
  return SkewHermitian(Matrix(0.5 * (m - m.adjoint())), Unchecked{});
}

SkewHermitian SkewHermitian::zero(Eigen::Index n) {
  return SkewHermitian(Matrix::Zero(n, n), Unchecked{});
}

SkewHermitian SkewHermitian::operator+(const SkewHermitian& o) const {
  return SkewHermitian(Matrix(m_ + o.m_), Unchecked{});
}

SkewHermitian SkewHermitian::operator-(const SkewHermitian& o) const {
  return SkewHermitian(Matrix(m_ - o.m_), Unchecked{});
}

SkewHermitian SkewHermitian::operator*(double s) const {
  return SkewHermitian(Matrix(s * m_), Unchecked{});
}

UnitaryMatrix::UnitaryMatrix(Matrix m, double tol) : m_(std::move(m)) {
  require_square(m_, "unitary matrix");
  const double defect = max_abs(m_ * m_.adjoint() - pinchlab::identity(m_.rows()));
  if (defect > tol) {
    throw InvalidArgument("matrix is not unitary (defect " + std::to_string(defect) + ")");
  }
}

UnitaryMatrix UnitaryMatrix::identity(Eigen::Index n) {
  return UnitaryMatrix(pinchlab::identity(n), Unchecked{});
}

UnitaryMatrix UnitaryMatrix::adjoint() const { return UnitaryMatrix(Matrix(m_.adjoint()), Unchecked{}); }

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("unitary product of different dimensions");
  return UnitaryMatrix(Matrix(m_ * o.m_), Unchecked{});
}

// ---------------------------------------------------------------------------

Svd svd(const Matrix& m) {
  if (!m.allFinite()) throw InvalidArgument("svd input has non-finite entries");
  Eigen::BDCSVD<Matrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Svd{UnitaryMatrix(solver.matrixU(), 1e-10), solver.singularValues(),
             UnitaryMatrix(solver.matrixV(), 1e-10)};
}

RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector();
  Eigen::BDCSVD<Matrix> solver(m);
  return solver.singularValues();
}

Polar polar(const Matrix& m, double tol_singular) {
  require_square(m, "polar input");
  Eigen::BDCSVD<Matrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = solver.singularValues();
  if (s.size() == 0 || s(s.size() - 1) <= tol_singular) {
    throw SingularFactor("smallest singular value " +
                         std::to_string(s.size() ? s(s.size() - 1) : 0.0) + " <= " +
                         std::to_string(tol_singular));
  }
  const Matrix& u = solver.matrixU();
  const Matrix& v = solver.matrixV();
  Matrix modulus = v * s.cast<Complex>().asDiagonal() * v.adjoint();
  modulus = 0.5 * (modulus + modulus.adjoint());
  return Polar{UnitaryMatrix(Matrix(u * v.adjoint()), 1e-10), modulus};
}

UnitaryMatrix expm_skew(const SkewHermitian& z) {
  // i z is hermitian: i z = V diag(l) V*, so e^z = V diag(e^{-i l}) V*.
  const Matrix h = Complex(0.0, 1.0) * z.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (h + h.adjoint()));
  const RealVector& l = eig.eigenvalues();
  Vector phases(l.size());
  for (Eigen::Index k = 0; k < l.size(); ++k) phases(k) = std::polar(1.0, -l(k));
  const Matrix& vecs = eig.eigenvectors();
  return UnitaryMatrix(Matrix(vecs * phases.asDiagonal() * vecs.adjoint()));
}

SkewHermitian logm_unitary(const UnitaryMatrix& u, double tol_log_gap) {
  // A unitary is normal, so its complex Schur form is diagonal up to rounding
  // and the Schur vectors are an orthonormal eigenbasis.
  Eigen::ComplexSchur<Matrix> schur(u.matrix());
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();
  Vector logs(t.rows());
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    const Complex mu = t(k, k);
    if (std::abs(mu + 1.0) < tol_log_gap) {
      throw LogBranchFailure("eigenvalue " + std::to_string(mu.real()) + "+" +
                             std::to_string(mu.imag()) + "i is within " +
                             std::to_string(tol_log_gap) + " of -1");
    }
    logs(k) = Complex(0.0, std::arg(mu));
  }
  return SkewHermitian::skew_part(q * logs.asDiagonal() * q.adjoint());
}

UnitaryMatrix random_unitary_near_identity(Eigen::Index n, double scale, std::uint64_t seed) {
  if (scale < 0.0) throw InvalidArgument("scale must be nonnegative");
  if (n < 1) throw InvalidArgument("dimension must be positive");
  Rng rng(seed);
  return expm_skew(rng.skew(n) * scale);
}

}  // namespace pinchlab
