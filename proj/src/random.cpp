#include "pinchlab/random.hpp"

namespace pinchlab {

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

int Rng::uniform_int(int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  return dist(engine_);
}

Matrix Rng::gaussian(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal();
      const double im = normal();
      m(i, j) = Complex(re, im);
    }
  return m;
}

SkewHermitian Rng::skew(Eigen::Index n) {
  const Matrix g = gaussian(n, n);
  Matrix z = 0.5 * (g - g.adjoint());
  const double norm = op_norm(z);
  if (norm > 0.0) z /= norm;
  return SkewHermitian::skew_part(z);
}

UnitaryMatrix Rng::haar_unitary(Eigen::Index n) {
  const Matrix g = gaussian(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return UnitaryMatrix(q, 1e-10);
}

Vector Rng::unit_vector(Eigen::Index n) {
  Vector v = gaussian(n, 1).col(0);
  return v / v.norm();
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t x = base ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace pinchlab
