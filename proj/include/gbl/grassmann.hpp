#pragma once

// Geometry of the oriented Grassmannian G(n,m) of n-planes in R^{n+m}.
//
// Planes are stored as orthonormal row frames. The Pluecker pairing of two
// planes is det(P Q^T); Jordan (principal) angles come from the SVD of the
// same n x n matrix. The chart around a base plane P0 writes a plane as the
// row span of eps_i + Z_{i,alpha} eps_{n+alpha}, where eps_i are the rows of
// P0 and eps_{n+alpha} a fixed oriented orthonormal complement of P0.

#include <Eigen/Dense>

#include "gbl/errors.hpp"

namespace gbl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kFrameTolerance = 1e-10;
inline constexpr double kChartTolerance = 1e-12;
inline constexpr double kCutLocusMargin = 1e-8;

class GrassmannPoint {
 public:
  // Orthonormalizes the row space of `rows` (n x (n+m)), keeping orientation.
  // Throws RankDeficient when the smallest singular value is below 1e-10.
  static GrassmannPoint from_rows(const Matrix& rows);

  // The coordinate plane eps_1 ^ ... ^ eps_n in R^{n+m}.
  static GrassmannPoint canonical(int n, int m);

  int n() const noexcept { return static_cast<int>(frame_.rows()); }
  int m() const noexcept { return static_cast<int>(frame_.cols() - frame_.rows()); }
  int ambient() const noexcept { return static_cast<int>(frame_.cols()); }
  const Matrix& frame() const noexcept { return frame_; }

  // Projector onto the plane, frame^T frame. Orientation-blind.
  Matrix projector() const { return frame_.transpose() * frame_; }

 private:
  explicit GrassmannPoint(Matrix frame) : frame_(std::move(frame)) {}
  Matrix frame_;
};

inline GrassmannPoint make_point(const Matrix& rows) { return GrassmannPoint::from_rows(rows); }

struct ChartCoordinates {
  Matrix Z;  // n x m
};

struct JordanDecomposition {
  // The p = min(n, m) Jordan angles, sorted descending, in [0, pi/2].
  Vector thetas;
  Vector lambdas;  // tan(theta), +inf at theta = pi/2
  Vector mus;      // cos(theta)
  // Rows are principal vectors; row k of left_basis (in the first plane)
  // pairs with row k of right_basis (in the second plane). Rows 0..p-1 carry
  // `thetas`; any remaining rows pair at angle zero.
  Matrix left_basis;
  Matrix right_basis;
  // Angle of every pair, aligned with the basis rows (length n).
  Vector pair_angles;
  // Sign of det W; the pairing is orientation-sensitive, the angles are not.
  int orientation_sign = 1;
};

// Orthonormal frame of the tangent and normal spaces of P, aligned with the
// Jordan directions relative to a reference plane P0. With e_k the principal
// vectors in P0 and a_k those in P, the normal partner of a_k is
// b_k = (cos(theta_k) a_k - e_k) / sin(theta_k); normals paired with a zero
// angle are completed from the orthogonal complement of P.
struct AdaptedFrame {
  Matrix base;       // frame of P as stored, fixes orientation
  Matrix tangent;    // n x (n+m), rows a_i spanning P
  Matrix normal;     // m x (n+m), rows b_alpha spanning P^perp
  Matrix reference;  // n x (n+m), rows e_i spanning P0
  Vector thetas;     // p angles aligned with the first p rows
  Vector lambdas;    // tan(thetas)
  double v = 1.0;    // v(P, P0)
};

// Tangent vector at a plane, in the orthonormal coframe omega_{i alpha} of an
// adapted frame: coefficient (i, alpha) is the component of the map a_i -> b_alpha.
struct TangentVector {
  AdaptedFrame frame;
  Matrix coeffs;  // n x m
};

// Oriented orthonormal complement of a plane, m x (n+m). Deterministic: built
// by pivoted Gram-Schmidt over the ambient coordinate axes, with the last row
// flipped if needed so that [frame; complement] has determinant +1. For the
// canonical plane this yields (0 | I_m).
Matrix orthonormal_complement(const GrassmannPoint& P);

double w_pairing(const GrassmannPoint& P, const GrassmannPoint& Q);
JordanDecomposition jordan_decompose(const GrassmannPoint& P, const GrassmannPoint& Q);
double distance(const GrassmannPoint& P, const GrassmannPoint& Q);

// v(P, P0) = 1 / w(P, P0). Throws OutOfChart when w <= 1e-12.
double v_value(const GrassmannPoint& P, const GrassmannPoint& P0);

// sqrt(det(I + Z Z^T)) from the singular values of Z.
double v_of_chart(const Matrix& Z);

GrassmannPoint from_chart(const ChartCoordinates& Z, const GrassmannPoint& P0);
ChartCoordinates to_chart(const GrassmannPoint& P, const GrassmannPoint& P0);

// Point at arc length t on the minimal geodesic from Q to P1, obtained by
// rotating each principal pair through theta_k * t / L. Throws CutLocus if a
// Jordan angle is within 1e-8 of pi/2 and PreconditionViolated for t outside
// [0, L].
GrassmannPoint geodesic(const GrassmannPoint& Q, const GrassmannPoint& P1, double t);

AdaptedFrame adapted_frame(const GrassmannPoint& P, const GrassmannPoint& P0);

// Riemannian exponential at frame.tangent's plane along the tangent vector
// with coefficients `coeffs`, evaluated at time t.
GrassmannPoint exp_map(const AdaptedFrame& frame, const Matrix& coeffs, double t);
inline GrassmannPoint exp_map(const TangentVector& X, double t) {
  return exp_map(X.frame, X.coeffs, t);
}

struct HessianResult {
  Matrix hessian;  // (n m) x (n m), index i * m + alpha
  AdaptedFrame frame;
};

// Hessian of v(., P0) at P in the adapted coframe omega_{i alpha}:
//   v on every slot (i, alpha) with i != alpha,
//   (1 + 2 lambda_alpha^2) v on the (alpha, alpha) slots,
//   lambda_alpha lambda_beta v coupling (alpha,alpha)-(beta,beta) and
//   (alpha,beta)-(beta,alpha) for alpha != beta.
// Requires m <= n.
HessianResult hessian_v(const GrassmannPoint& P, const GrassmannPoint& P0);

// Same matrix from a Jordan profile alone (n >= m, lambdas of length m).
Matrix hessian_v_matrix(int n, const Vector& lambdas);

// True iff every pairwise sum of Jordan angles to P0 is below pi/2 (for a
// single angle, theta_1 < pi/2). Planes with w(P, P0) <= 0 are outside.
bool in_bjx(const GrassmannPoint& P, const GrassmannPoint& P0);

// T(Z) = (v - 1) Z / |Z| flattened row-major into R^{n m}; T(0) = 0.
Vector t_embedding(const Matrix& Z);
// Inverse of t_embedding. Throws InversionFailure if no bracket is found.
Matrix t_embedding_inverse(const Vector& y, int n, int m);

}  // namespace gbl
