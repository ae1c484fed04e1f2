#pragma once

#include <cmath>

#include "occert/curvature_algebra.hpp"
#include "occert/hermitian_linalg.hpp"

namespace occert::test {

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Vec basis(int dim, int i) {
  Vec e = Vec::Zero(dim);
  e(i) = 1.0;
  return e;
}

inline Mat random_spd(Rng& rng, int dim, double spread = 0.3) {
  const Mat B = rng.normal_matrix(dim, dim);
  return Mat::Identity(dim, dim) + spread * B * B.transpose() / dim;
}

// Direct evaluation of R(X, e_i, Y, e_i) summed, used as an oracle for the
// contraction routines.
inline Mat ricci_oracle(const CurvatureTensor& R) {
  const int n = R.dim();
  Mat out = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i) out(a, b) += R.evaluate(basis(n, a), basis(n, i), basis(n, b), basis(n, i));
  return out;
}

inline Mat ricci_star_oracle(const CurvatureTensor& R, const Mat& J) {
  const int n = R.dim();
  Mat out = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i)
        out(a, b) += R.evaluate(basis(n, a), basis(n, i), J * basis(n, b), J * basis(n, i));
  return out;
}

}  // namespace occert::test
