#pragma once

// Shared generators for the test suites.

#include <cmath>

#include "gbl/grassmann.hpp"
#include "gbl/rng.hpp"

namespace gbl::testing {

inline Matrix random_matrix(Engine& rng, int rows, int cols, double scale = 1.0) {
  Matrix A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A(i, j) = scale * gaussian(rng);
  return A;
}

inline GrassmannPoint random_point(Engine& rng, int n, int m) {
  return GrassmannPoint::from_rows(random_matrix(rng, n, n + m));
}

// Plane in R^{n+m} obtained from (I | 0) by rotating the (x_1, x_{n+1})
// coordinate plane through theta.
inline GrassmannPoint single_rotation(int n, int m, double theta) {
  Matrix rows = Matrix::Zero(n, n + m);
  rows.leftCols(n).setIdentity();
  rows(0, 0) = std::cos(theta);
  rows(0, n) = std::sin(theta);
  return GrassmannPoint::from_rows(rows);
}

// Plane with prescribed Jordan angles to the canonical plane (m <= n).
inline GrassmannPoint plane_with_angles(int n, int m, const Vector& thetas) {
  Matrix rows = Matrix::Zero(n, n + m);
  rows.leftCols(n).setIdentity();
  for (Eigen::Index a = 0; a < thetas.size(); ++a) {
    rows(a, a) = std::cos(thetas(a));
    rows(a, n + a) = std::sin(thetas(a));
  }
  return GrassmannPoint::from_rows(rows);
}

// Random in-chart plane around P0 with chart entries uniform in [-r, r].
inline GrassmannPoint random_chart_point(Engine& rng, const GrassmannPoint& P0, double r) {
  Matrix Z(P0.n(), P0.m());
  for (int i = 0; i < P0.n(); ++i)
    for (int a = 0; a < P0.m(); ++a) Z(i, a) = uniform(rng, -r, r);
  return from_chart({Z}, P0);
}

inline double max_abs(const Matrix& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace gbl::testing
