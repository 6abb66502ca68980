#include "gbl/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "gbl/optimize.hpp"

namespace gbl {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;
// Below this sine a Jordan pair is treated as coincident when building normals.
constexpr double kPairedNormalMinSine = 1e-7;

void require_same_shape(const GrassmannPoint& P, const GrassmannPoint& Q, const char* what) {
  if (P.n() != Q.n() || P.m() != Q.m())
    throw DimensionMismatch(std::string(what) + ": planes live in different Grassmannians");
}

// Gram-Schmidt of `rows` against themselves and against the rows of `against`.
// Performed twice for stability.
void orthonormalize_rows(Matrix& rows, const Matrix& against) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index k = 0; k < rows.rows(); ++k) {
      Vector r = rows.row(k).transpose();
      if (against.rows() > 0) r -= against.transpose() * (against * r);
      for (Eigen::Index j = 0; j < k; ++j) r -= rows.row(j).dot(r) * rows.row(j).transpose();
      rows.row(k) = r.normalized().transpose();
    }
  }
}

}  // namespace

GrassmannPoint GrassmannPoint::from_rows(const Matrix& rows) {
  const auto n = rows.rows();
  const auto N = rows.cols();
  if (n < 1 || N <= n) throw DimensionMismatch("make_point: need 1 <= n < n + m");
  if (!rows.allFinite()) throw PreconditionViolated("make_point: non-finite entries");

  Eigen::JacobiSVD<Matrix> svd(rows);
  const double smallest = svd.singularValues()(n - 1);
  if (smallest < kFrameTolerance)
    throw RankDeficient("make_point: smallest singular value " + std::to_string(smallest));

  // rows^T = Q R with diag(R) > 0, so rows = (R^T) Q^T with det(R^T) > 0.
  Eigen::HouseholderQR<Matrix> qr(rows.transpose());
  Matrix q = qr.householderQ() * Matrix::Identity(N, n);
  const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k)
    if (r(k, k) < 0) q.col(k) *= -1.0;
  Matrix frame = q.transpose();
  orthonormalize_rows(frame, Matrix(0, N));
  return GrassmannPoint(std::move(frame));
}

GrassmannPoint GrassmannPoint::canonical(int n, int m) {
  if (n < 1 || m < 1) throw DimensionMismatch("canonical: need n, m >= 1");
  Matrix frame = Matrix::Zero(n, n + m);
  frame.leftCols(n).setIdentity();
  return GrassmannPoint(std::move(frame));
}

Matrix orthonormal_complement(const GrassmannPoint& P) {
  const Matrix& F = P.frame();
  const int N = P.ambient();
  const int m = P.m();
  Matrix C(m, N);
  for (int row = 0; row < m; ++row) {
    Vector best;
    double best_norm = -1.0;
    for (int k = 0; k < N; ++k) {
      Vector r = Vector::Unit(N, k);
      r -= F.transpose() * (F * r);
      if (row > 0) r -= C.topRows(row).transpose() * (C.topRows(row) * r);
      const double nr = r.norm();
      if (nr > best_norm + 1e-12) {
        best_norm = nr;
        best = r;
      }
    }
    C.row(row) = best.normalized().transpose();
  }
  orthonormalize_rows(C, F);
  Matrix full(N, N);
  full << F, C;
  if (full.determinant() < 0) C.row(m - 1) *= -1.0;
  return C;
}

double w_pairing(const GrassmannPoint& P, const GrassmannPoint& Q) {
  require_same_shape(P, Q, "w_pairing");
  return (P.frame() * Q.frame().transpose()).determinant();
}

JordanDecomposition jordan_decompose(const GrassmannPoint& P, const GrassmannPoint& Q) {
  require_same_shape(P, Q, "jordan_decompose");
  const int n = P.n();
  const int p = std::min(P.n(), P.m());
  const Matrix W = P.frame() * Q.frame().transpose();
  Eigen::JacobiSVD<Matrix> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix e = svd.matrixU().transpose() * P.frame();
  const Matrix f = svd.matrixV().transpose() * Q.frame();

  // The projection of f_k onto P is exactly sigma_k e_k, so the residual
  // norm is sin(theta_k); atan2 keeps small and near-right angles accurate.
  Vector angle(n), cosine(n), sine(n);
  for (int k = 0; k < n; ++k) {
    const double sigma = std::clamp(svd.singularValues()(k), 0.0, 1.0);
    const double s = std::min(1.0, (f.row(k) - sigma * e.row(k)).norm());
    angle(k) = std::atan2(s, sigma);
    cosine(k) = sigma;
    sine(k) = s;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return angle(a) > angle(b); });

  JordanDecomposition J;
  J.left_basis.resize(n, P.ambient());
  J.right_basis.resize(n, P.ambient());
  J.pair_angles.resize(n);
  J.thetas.resize(p);
  J.mus.resize(p);
  J.lambdas.resize(p);
  for (int k = 0; k < n; ++k) {
    const int src = order[k];
    J.left_basis.row(k) = e.row(src);
    J.right_basis.row(k) = f.row(src);
    J.pair_angles(k) = angle(src);
    if (k < p) {
      J.thetas(k) = angle(src);
      J.mus(k) = std::cos(angle(src));
      J.lambdas(k) = cosine(src) > 0.0 ? sine(src) / cosine(src)
                                       : std::numeric_limits<double>::infinity();
    }
  }
  J.orientation_sign = W.determinant() < 0.0 ? -1 : 1;
  return J;
}

double distance(const GrassmannPoint& P, const GrassmannPoint& Q) {
  return jordan_decompose(P, Q).thetas.norm();
}

double v_value(const GrassmannPoint& P, const GrassmannPoint& P0) {
  const double w = w_pairing(P, P0);
  if (w <= kChartTolerance) throw OutOfChart("v_value: w(P, P0) = " + std::to_string(w));
  return 1.0 / w;
}

double v_of_chart(const Matrix& Z) {
  if (Z.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(Z);
  double log_v = 0.0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    log_v += 0.5 * std::log1p(svd.singularValues()(k) * svd.singularValues()(k));
  return std::exp(log_v);
}

GrassmannPoint from_chart(const ChartCoordinates& Z, const GrassmannPoint& P0) {
  if (Z.Z.rows() != P0.n() || Z.Z.cols() != P0.m())
    throw DimensionMismatch("from_chart: Z must be n x m");
  if (!Z.Z.allFinite()) throw PreconditionViolated("from_chart: non-finite Z");
  const Matrix C = orthonormal_complement(P0);
  return GrassmannPoint::from_rows(P0.frame() + Z.Z * C);
}

ChartCoordinates to_chart(const GrassmannPoint& P, const GrassmannPoint& P0) {
  require_same_shape(P, P0, "to_chart");
  const Matrix A = P.frame() * P0.frame().transpose();
  const double w = A.determinant();
  if (w <= kChartTolerance) throw OutOfChart("to_chart: w(P, P0) = " + std::to_string(w));
  const Matrix B = P.frame() * orthonormal_complement(P0).transpose();
  return {A.partialPivLu().solve(B)};
}

GrassmannPoint geodesic(const GrassmannPoint& Q, const GrassmannPoint& P1, double t) {
  const JordanDecomposition J = jordan_decompose(Q, P1);
  if (J.orientation_sign < 0)
    throw CutLocus("geodesic: planes are oppositely oriented relative to each other");
  if (J.thetas.size() > 0 && J.thetas.maxCoeff() >= kHalfPi - kCutLocusMargin)
    throw CutLocus("geodesic: a Jordan angle reaches pi/2");
  const double L = J.thetas.norm();
  if (t < -1e-12 || t > L + 1e-12)
    throw PreconditionViolated("geodesic: t outside [0, L]");
  if (L == 0.0) return Q;
  const double s = std::clamp(t, 0.0, L) / L;

  const int n = Q.n();
  Matrix rows(n, Q.ambient());
  for (int k = 0; k < n; ++k) {
    const Vector e = J.left_basis.row(k).transpose();
    const Vector f = J.right_basis.row(k).transpose();
    const double c = e.dot(f);
    const Vector r = f - c * e;
    const double nr = r.norm();
    if (nr == 0.0) {
      rows.row(k) = e.transpose();
      continue;
    }
    const double phi = std::atan2(nr, c) * s;
    rows.row(k) = (std::cos(phi) * e + std::sin(phi) * (r / nr)).transpose();
  }
  // Express in Q's own frame so that s = 0 reproduces Q with its orientation.
  const Matrix to_q = Q.frame() * J.left_basis.transpose();
  return GrassmannPoint::from_rows(to_q * rows);
}

AdaptedFrame adapted_frame(const GrassmannPoint& P, const GrassmannPoint& P0) {
  require_same_shape(P, P0, "adapted_frame");
  AdaptedFrame frame;
  frame.v = v_value(P, P0);
  const JordanDecomposition J = jordan_decompose(P0, P);
  const int m = P.m();
  const int p = static_cast<int>(J.thetas.size());
  frame.base = P.frame();
  frame.reference = J.left_basis;
  frame.tangent = J.right_basis;
  frame.thetas = J.thetas;
  frame.lambdas = J.lambdas;

  Matrix normal = Matrix::Zero(m, P.ambient());
  std::vector<int> missing;
  for (int a = 0; a < m; ++a) {
    if (a < p && std::sin(J.thetas(a)) > kPairedNormalMinSine) {
      const double th = J.thetas(a);
      normal.row(a) = (std::cos(th) * J.right_basis.row(a) - J.left_basis.row(a)) / std::sin(th);
    } else {
      missing.push_back(a);
    }
  }
  if (!missing.empty()) {
    // Fill from the complement of P, orthogonal to the normals already fixed.
    const Matrix comp = orthonormal_complement(P);
    std::vector<int> fixed;
    for (int a = 0; a < m; ++a)
      if (std::find(missing.begin(), missing.end(), a) == missing.end()) fixed.push_back(a);
    Matrix taken(static_cast<Eigen::Index>(fixed.size()), P.ambient());
    for (std::size_t i = 0; i < fixed.size(); ++i) taken.row(static_cast<Eigen::Index>(i)) = normal.row(fixed[i]);
    for (int slot : missing) {
      Vector best;
      double best_norm = -1.0;
      for (Eigen::Index c = 0; c < comp.rows(); ++c) {
        Vector r = comp.row(c).transpose();
        if (taken.rows() > 0) r -= taken.transpose() * (taken * r);
        if (r.norm() > best_norm + 1e-12) {
          best_norm = r.norm();
          best = r;
        }
      }
      normal.row(slot) = best.normalized().transpose();
      taken.conservativeResize(taken.rows() + 1, Eigen::NoChange);
      taken.row(taken.rows() - 1) = normal.row(slot);
    }
  }
  frame.normal = normal;
  return frame;
}

GrassmannPoint exp_map(const AdaptedFrame& frame, const Matrix& coeffs, double t) {
  const auto n = frame.tangent.rows();
  const auto m = frame.normal.rows();
  if (coeffs.rows() != n || coeffs.cols() != m)
    throw DimensionMismatch("exp_map: coefficients must be n x m");
  Eigen::JacobiSVD<Matrix> svd(coeffs, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix a = svd.matrixU().transpose() * frame.tangent;
  const Matrix b = svd.matrixV().transpose() * frame.normal;
  Matrix rows = a;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    const double angle = svd.singularValues()(k) * t;
    rows.row(k) = std::cos(angle) * a.row(k) + std::sin(angle) * b.row(k);
  }
  const Matrix to_base = frame.base * a.transpose();
  return GrassmannPoint::from_rows(to_base * rows);
}

Matrix hessian_v_matrix(int n, const Vector& lambdas) {
  const int m = static_cast<int>(lambdas.size());
  if (m > n) throw DimensionMismatch("hessian_v: requires m <= n");
  double v = 1.0;
  for (int a = 0; a < m; ++a) v *= std::sqrt(1.0 + lambdas(a) * lambdas(a));
  auto idx = [m](int i, int a) { return i * m + a; };
  Matrix H = Matrix::Zero(n * m, n * m);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a)
      H(idx(i, a), idx(i, a)) = (i == a) ? (1.0 + 2.0 * lambdas(a) * lambdas(a)) * v : v;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      const double c = lambdas(a) * lambdas(b) * v;
      H(idx(a, a), idx(b, b)) = c;
      H(idx(a, b), idx(b, a)) = c;
    }
  return H;
}

HessianResult hessian_v(const GrassmannPoint& P, const GrassmannPoint& P0) {
  if (P.m() > P.n()) throw DimensionMismatch("hessian_v: requires m <= n");
  HessianResult result;
  result.frame = adapted_frame(P, P0);
  result.hessian = hessian_v_matrix(P.n(), result.frame.lambdas);
  return result;
}

bool in_bjx(const GrassmannPoint& P, const GrassmannPoint& P0) {
  const JordanDecomposition J = jordan_decompose(P, P0);
  if (J.orientation_sign < 0) return false;
  if (J.thetas.size() == 1) return J.thetas(0) < kHalfPi;
  return J.thetas(0) + J.thetas(1) < kHalfPi;
}

Vector t_embedding(const Matrix& Z) {
  const auto n = Z.rows();
  const auto m = Z.cols();
  Vector y = Vector::Zero(n * m);
  const double norm = Z.norm();
  if (norm == 0.0) return y;
  Eigen::JacobiSVD<Matrix> svd(Z);
  double log_v = 0.0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    log_v += 0.5 * std::log1p(svd.singularValues()(k) * svd.singularValues()(k));
  const double scale = std::expm1(log_v) / norm;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index a = 0; a < m; ++a) y(i * m + a) = scale * Z(i, a);
  return y;
}

Matrix t_embedding_inverse(const Vector& y, int n, int m) {
  if (y.size() != static_cast<Eigen::Index>(n) * m)
    throw DimensionMismatch("t_embedding_inverse: vector length must be n m");
  Matrix Z = Matrix::Zero(n, m);
  const double radius = y.norm();
  if (radius == 0.0) return Z;
  Matrix direction(n, m);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) direction(i, a) = y(i * m + a) / radius;
  Eigen::JacobiSVD<Matrix> svd(direction);
  const Vector sigma = svd.singularValues();
  auto excess = [&](double s) {
    double log_v = 0.0;
    for (Eigen::Index k = 0; k < sigma.size(); ++k) log_v += 0.5 * std::log1p(s * s * sigma(k) * sigma(k));
    return std::expm1(log_v) - radius;
  };
  double hi = 1.0;
  int doublings = 0;
  while (excess(hi) <= 0.0) {
    hi *= 2.0;
    if (++doublings > 2000 || !std::isfinite(hi))
      throw InversionFailure("t_embedding_inverse: no bracket for the scaling root");
  }
  const double s = bisect_root(excess, 0.0, hi, std::max(4e-16 * hi, 1e-300));
  return s * direction;
}

}  // namespace gbl
