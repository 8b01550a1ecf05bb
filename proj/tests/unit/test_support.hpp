#pragma once

#include <vector>

#include "pinchlab/experiments.hpp"
#include "pinchlab/linalg.hpp"
#include "pinchlab/pinching.hpp"
#include "pinchlab/random.hpp"

namespace pinchlab::test {

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix unit_vectors(Eigen::Index n, std::initializer_list<Eigen::Index> idx) {
  Matrix f = Matrix::Zero(n, static_cast<Eigen::Index>(idx.size()));
  Eigen::Index c = 0;
  for (Eigen::Index i : idx) f(i, c++) = 1.0;
  return f;
}

inline ProjectionFamily coordinate_family(Eigen::Index n, std::vector<int> sizes) {
  return ProjectionFamily::coordinate(n, sizes);
}

inline SkewHermitian block_diagonal_skew(const ProjectionFamily& fam, Rng& rng) {
  const Matrix g = rng.skew(fam.dim()).matrix();
  Matrix d = Matrix::Zero(fam.dim(), fam.dim());
  for (int i = 0; i <= fam.block_count(); ++i) d += fam.projector(i) * g * fam.projector(i);
  return SkewHermitian::skew_part(d);
}

inline SkewHermitian off_diagonal_skew(const ProjectionFamily& fam, Rng& rng) {
  const Matrix g = rng.skew(fam.dim()).matrix();
  Matrix d = g;
  for (int i = 0; i <= fam.block_count(); ++i) d -= fam.projector(i) * g * fam.projector(i);
  return SkewHermitian::skew_part(d);
}

}  // namespace pinchlab::test
