#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "pinchlab/errors.hpp"

namespace pinchlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Default tolerances shared across modules.
inline constexpr double kTolConstruct = 1e-12;
inline constexpr double kTolSingular = 1e-10;
inline constexpr double kTolLogGap = 1e-8;

double op_norm(const Matrix& m);
double max_abs(const Matrix& m);
Matrix identity(Eigen::Index n);

/// Throws DimensionMismatch unless `m` is square (and of size `n` when n >= 0).
void require_square(const Matrix& m, const char* what, Eigen::Index n = -1);

class SkewHermitian {
 public:
  /// Validates ||m + m*||_max <= tol.
  explicit SkewHermitian(Matrix m, double tol = kTolConstruct);
  /// Returns the skew-hermitian part (m - m*) / 2 without validation.
  static SkewHermitian skew_part(const Matrix& m);
  static SkewHermitian zero(Eigen::Index n);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  SkewHermitian operator+(const SkewHermitian& o) const;
  SkewHermitian operator-(const SkewHermitian& o) const;
  SkewHermitian operator*(double s) const;

 private:
  struct Unchecked {};
  SkewHermitian(Matrix m, Unchecked) : m_(std::move(m)) {}
  Matrix m_;
};

class UnitaryMatrix {
 public:
  /// Validates ||m m* - 1||_max <= tol.
  explicit UnitaryMatrix(Matrix m, double tol = kTolConstruct);
  static UnitaryMatrix identity(Eigen::Index n);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  UnitaryMatrix adjoint() const;
  UnitaryMatrix operator*(const UnitaryMatrix& o) const;

 private:
  struct Unchecked {};
  UnitaryMatrix(Matrix m, Unchecked) : m_(std::move(m)) {}
  Matrix m_;
};

struct Svd {
  UnitaryMatrix u;
  RealVector s;  // nonincreasing
  UnitaryMatrix v;
};

/// Full singular value decomposition m = u diag(s) v*.
Svd svd(const Matrix& m);
RealVector singular_values(const Matrix& m);

struct Polar {
  UnitaryMatrix unitary;
  Matrix modulus;  // (m* m)^{1/2}
};

/// m = unitary * modulus. Throws SingularFactor when the smallest singular
/// value is <= tol_singular.
Polar polar(const Matrix& m, double tol_singular = kTolSingular);

UnitaryMatrix expm_skew(const SkewHermitian& z);

/// Principal logarithm with eigenvalue arguments in (-pi, pi). Throws
/// LogBranchFailure if an eigenvalue lies within tol_log_gap of -1.
SkewHermitian logm_unitary(const UnitaryMatrix& u, double tol_log_gap = kTolLogGap);

/// expm_skew(scale * z) with z a seeded gaussian skew-hermitian matrix of unit
/// operator norm.
UnitaryMatrix random_unitary_near_identity(Eigen::Index n, double scale, std::uint64_t seed);

}  // namespace pinchlab
