#pragma once

// Graphs x -> (x, f(x)) in R^{n+m} with analytic first and second derivatives:
// induced metric, slope, Gauss map, second fundamental form in adapted
// frames, and two independent evaluations of the Laplacian of v along the
// Gauss map.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gbl/certifier.hpp"
#include "gbl/grassmann.hpp"

namespace gbl {

class GraphImmersion {
 public:
  using EvalFn = std::function<Vector(const Vector&)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;                 // m x n
  using HessianFn = std::function<std::vector<Matrix>(const Vector&)>;     // m matrices, n x n
  using ExcludedFn = std::function<bool(const Vector&)>;

  // Throws InvalidGraphSpec when the supplied derivatives disagree with
  // central differences of `eval` (relative tolerance 1e-6) at a few
  // deterministic points of the domain.
  GraphImmersion(std::string name, int n, int m, EvalFn eval, JacobianFn jacobian, HessianFn hessian,
                 double radius = std::numeric_limits<double>::infinity(), ExcludedFn excluded = {});

  const std::string& name() const noexcept { return name_; }
  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  double radius() const noexcept { return radius_; }

  bool in_domain(const Vector& x) const;
  // Throws OutOfDomain unless in_domain(x).
  void require_domain(const Vector& x) const;

  Vector eval(const Vector& x) const { return eval_(x); }
  Matrix jacobian(const Vector& x) const { return jacobian_(x); }
  std::vector<Matrix> hessian(const Vector& x) const { return hessian_(x); }

  // Largest relative derivative discrepancy seen during construction.
  double validation_error() const noexcept { return validation_error_; }

 private:
  std::string name_;
  int n_, m_;
  EvalFn eval_;
  JacobianFn jacobian_;
  HessianFn hessian_;
  double radius_;
  ExcludedFn excluded_;
  double validation_error_ = 0.0;
};

// f(x) = A x + b, any n and m.
GraphImmersion affine_graph(const Matrix& A, const Vector& b);
// n = 3, m = 2: f = (x1^2 - x2^2, 2 x1 x2).
GraphImmersion holomorphic_pair();
// n = 4, m = 3: f = (sqrt5/2) |x| eta(x/|x|), eta the Hopf map; origin excluded.
GraphImmersion lawson_osserman();
// "holomorphic_pair", "lawson_osserman", or "affine" (the zero map R^3 -> R^2).
GraphImmersion builtin(const std::string& name);

// Graph from a JSON document: {"name": builtin-id}, {"name": "affine", "A": [[..]], "b": [..]},
// or {"n": n, "m": m, "components": [{"monomials": [{"exponents": [..], "coeff": c}]}]}.
// Throws InvalidGraphSpec for malformed input and UnknownName for unknown builtins.
GraphImmersion graph_from_json(const std::string& text);
GraphImmersion graph_from_file(const std::string& path);

struct PointGeometry {
  Vector x;
  Matrix Df;      // m x n
  Matrix g;       // n x n, I + Df^T Df
  double sqrtG = 1.0;
  Matrix g_inv;
  double slope = 1.0;
  GrassmannPoint gauss = GrassmannPoint::canonical(1, 1);
  LambdaProfile lambda;  // singular values of Df
  Matrix U, V;           // Df = U diag(lambda) V^T, full orthogonal factors
  HTensor h_adapted;     // in the singular-value-adapted frames
  Vector meanH;          // m-vector, trace of h_alpha
  double normB2 = 0.0;
};

// Requires m <= n.
PointGeometry point_geometry(const GraphImmersion& G, const Vector& x);

// |B|^2 from the normal projection of D^2 f, contracted with g^-1, without
// any frame.
double normB2_frame_free(const GraphImmersion& G, const Vector& x);

// v(gauss(x), P0).
double v_along_gauss(const GraphImmersion& G, const Vector& x, const GrassmannPoint& P0);

// Delta v from lambda and h in frames adapted to (gauss(x), P0).
double laplacian_v_closed_form(const GraphImmersion& G, const Vector& x, const GrassmannPoint& P0);

// Divergence-form Laplace-Beltrami operator applied to v(gauss(.), P0) with
// conservative half-step coefficients; second order in `step`.
double laplacian_v_finite_difference(const GraphImmersion& G, const Vector& x, const GrassmannPoint& P0,
                                     double step);

struct EllipticityResult {
  double min_ratio = 1.0;
  double max_ratio = 1.0;
  double sup_slope = 1.0;
  std::size_t samples = 0;
};

// Extremal eigenvalues of sqrt(G) g^-1 at sampled points of the ball
// |x - center| <= radius (excluded points are skipped).
EllipticityResult ellipticity_check(const GraphImmersion& G, const Vector& center, double radius,
                                    std::size_t samples, std::uint64_t seed);

struct MeanGaussImage {
  GrassmannPoint plane = GrassmannPoint::canonical(1, 1);
  double v = 1.0;      // v(plane, P0)
  double sup_v = 1.0;  // largest v(gauss, P0) over quadrature nodes
  std::size_t nodes = 0;
};

// T^-1 of the volume-weighted average of T(gauss) over the ball, with
// Gauss-Legendre quadrature of `order` points per hyperspherical coordinate.
MeanGaussImage mean_gauss_image(const GraphImmersion& G, const Vector& center, double radius,
                                const GrassmannPoint& P0, int order = 8);

}  // namespace gbl
