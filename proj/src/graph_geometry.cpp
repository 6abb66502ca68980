#include "gbl/graph_geometry.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>

namespace gbl {

namespace {

constexpr double kValidationTolerance = 1e-6;
constexpr double kValidationStep = 1e-5;

double rel_error(const Matrix& approx, const Matrix& exact) {
  return (approx - exact).cwiseAbs().maxCoeff() / std::max(1.0, exact.cwiseAbs().maxCoeff());
}

// Coordinates of ambient vectors: first n entries along x, last m along f.
Matrix graph_jacobian_frame(const Matrix& Df) {
  const auto m = Df.rows(), n = Df.cols();
  Matrix J(n + m, n);
  J.topRows(n).setIdentity();
  J.bottomRows(m) = Df;
  return J;
}

// sqrt(G) g^-1 at a point.
Matrix flux_coefficients(const GraphImmersion& G, const Vector& y) {
  const Matrix Df = G.jacobian(y);
  const Matrix g = Matrix::Identity(G.n(), G.n()) + Df.transpose() * Df;
  Eigen::LDLT<Matrix> ldlt(g);
  const double sqrtG = std::sqrt(ldlt.vectorD().prod());
  return sqrtG * ldlt.solve(Matrix::Identity(G.n(), G.n()));
}

}  // namespace

GraphImmersion::GraphImmersion(std::string name, int n, int m, EvalFn eval, JacobianFn jacobian,
                               HessianFn hessian, double radius, ExcludedFn excluded)
    : name_(std::move(name)),
      n_(n),
      m_(m),
      eval_(std::move(eval)),
      jacobian_(std::move(jacobian)),
      hessian_(std::move(hessian)),
      radius_(radius),
      excluded_(std::move(excluded)) {
  if (n < 1 || m < 1) throw InvalidGraphSpec("graph " + name_ + ": need n, m >= 1");
  if (!eval_ || !jacobian_ || !hessian_) throw InvalidGraphSpec("graph " + name_ + ": missing evaluator");
  if (!(radius_ > 0.0)) throw InvalidGraphSpec("graph " + name_ + ": domain radius must be positive");

  Engine rng = substream(0x9e3779b9u, static_cast<std::uint64_t>(n * 131 + m));
  const double scale = std::min(1.0, 0.8 * radius_);
  int checked = 0;
  for (int attempt = 0; attempt < 64 && checked < 3; ++attempt) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = gaussian(rng);
    x *= scale * uniform(rng, 0.5, 1.0) / std::max(x.norm(), 1e-300);
    const double h = kValidationStep * std::max(1.0, x.norm());
    bool inside = in_domain(x);
    for (int i = 0; i < n && inside; ++i)
      inside = in_domain(x + 2.0 * h * Vector::Unit(n, i)) && in_domain(x - 2.0 * h * Vector::Unit(n, i));
    if (!inside) continue;

    const Vector f = eval_(x);
    const Matrix J = jacobian_(x);
    const auto H = hessian_(x);
    if (f.size() != m || J.rows() != m || J.cols() != n || static_cast<int>(H.size()) != m)
      throw InvalidGraphSpec("graph " + name_ + ": evaluator shapes disagree with (n, m)");
    Matrix Jfd(m, n);
    std::vector<Matrix> Hfd(m, Matrix(n, n));
    for (int i = 0; i < n; ++i) {
      const Vector e = h * Vector::Unit(n, i);
      Jfd.col(i) = (eval_(x + e) - eval_(x - e)) / (2.0 * h);
      const Matrix dJ = (jacobian_(x + e) - jacobian_(x - e)) / (2.0 * h);
      for (int a = 0; a < m; ++a) Hfd[a].col(i) = dJ.row(a).transpose();
    }
    validation_error_ = std::max(validation_error_, rel_error(Jfd, J));
    for (int a = 0; a < m; ++a) {
      if (H[a].rows() != n || H[a].cols() != n)
        throw InvalidGraphSpec("graph " + name_ + ": Hessian blocks must be n x n");
      validation_error_ = std::max(validation_error_, rel_error(Hfd[a], H[a]));
      validation_error_ = std::max(validation_error_, rel_error(H[a].transpose(), H[a]));
    }
    ++checked;
  }
  if (checked == 0) throw InvalidGraphSpec("graph " + name_ + ": no interior validation point found");
  if (validation_error_ > kValidationTolerance)
    throw InvalidGraphSpec("graph " + name_ + ": derivatives disagree with central differences (rel. error " +
                           std::to_string(validation_error_) + ")");
}

bool GraphImmersion::in_domain(const Vector& x) const {
  if (x.size() != n_ || !x.allFinite()) return false;
  if (!(x.norm() < radius_)) return false;
  return !(excluded_ && excluded_(x));
}

void GraphImmersion::require_domain(const Vector& x) const {
  if (x.size() != n_) throw DimensionMismatch("graph " + name_ + ": point has wrong dimension");
  if (!in_domain(x)) throw OutOfDomain("graph " + name_ + ": point outside the domain");
}

// --------------------------------------------------------- point geometry

PointGeometry point_geometry(const GraphImmersion& G, const Vector& x) {
  G.require_domain(x);
  const int n = G.n(), m = G.m();
  if (m > n) throw DimensionMismatch("point_geometry: requires m <= n");
  PointGeometry pg;
  pg.x = x;
  pg.Df = G.jacobian(x);
  pg.g = Matrix::Identity(n, n) + pg.Df.transpose() * pg.Df;
  pg.g_inv = pg.g.ldlt().solve(Matrix::Identity(n, n));

  Eigen::JacobiSVD<Matrix> svd(pg.Df, Eigen::ComputeFullU | Eigen::ComputeFullV);
  pg.U = svd.matrixU();
  pg.V = svd.matrixV();
  const Vector sigma = svd.singularValues();
  pg.lambda = LambdaProfile::make(n, sigma);
  pg.slope = pg.lambda.v;
  pg.sqrtG = pg.slope;
  pg.gauss = from_chart({pg.Df.transpose()}, GrassmannPoint::canonical(n, m));

  // Tangent t_k = (V_k, sigma_k U_k) / sqrt(1 + sigma_k^2), normal
  // nu_a = (-sigma_a V_a, U_a) / sqrt(1 + sigma_a^2).
  const auto H = G.hessian(x);
  std::vector<Matrix> rotated(m);
  for (int b = 0; b < m; ++b) rotated[b] = pg.V.transpose() * H[b] * pg.V;
  Vector scale(n);
  for (int k = 0; k < n; ++k) scale(k) = k < m ? std::sqrt(1.0 + sigma(k) * sigma(k)) : 1.0;
  pg.h_adapted = HTensor(n, m);
  pg.meanH = Vector::Zero(m);
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) {
        double s = 0.0;
        for (int b = 0; b < m; ++b) s += pg.U(b, a) * rotated[b](k, l);
        const double value = s / (scale(a) * scale(k) * scale(l));
        pg.h_adapted.set(a, k, l, value);
        if (k == l) pg.meanH(a) += value;
      }
  pg.normB2 = pg.h_adapted.norm2();
  return pg;
}

double normB2_frame_free(const GraphImmersion& G, const Vector& x) {
  G.require_domain(x);
  const int n = G.n(), m = G.m();
  const Matrix Df = G.jacobian(x);
  const Matrix g = Matrix::Identity(n, n) + Df.transpose() * Df;
  const Matrix g_inv = g.ldlt().solve(Matrix::Identity(n, n));
  const auto H = G.hessian(x);
  // a_ij = D^2 f(e_i, e_j) in R^m; its normal part has Gram entries
  // a_ij . a_kl - (Df^T a_ij)^T g^-1 (Df^T a_kl).
  std::vector<Vector> a(n * n), t(n * n), p(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vector v(m);
      for (int b = 0; b < m; ++b) v(b) = H[b](i, j);
      a[i * n + j] = v;
      t[i * n + j] = Df.transpose() * v;
      p[i * n + j] = g_inv * t[i * n + j];
    }
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double w = g_inv(i, k) * g_inv(j, l);
          if (w == 0.0) continue;
          total += w * (a[i * n + j].dot(a[k * n + l]) - t[i * n + j].dot(p[k * n + l]));
        }
  return total;
}

double v_along_gauss(const GraphImmersion& G, const Vector& x, const GrassmannPoint& P0) {
  G.require_domain(x);
  if (P0.n() != G.n() || P0.m() != G.m()) throw DimensionMismatch("v_along_gauss: P0 has the wrong shape");
  const Matrix Df = G.jacobian(x);
  return v_value(from_chart({Df.transpose()}, GrassmannPoint::canonical(G.n(), G.m())), P0);
}

double laplacian_v_closed_form(const GraphImmersion& G, const Vector& x, const GrassmannPoint& P0) {
  G.require_domain(x);
  const int n = G.n(), m = G.m();
  if (m > n) throw DimensionMismatch("laplacian_v_closed_form: requires m <= n");
  if (P0.n() != n || P0.m() != m) throw DimensionMismatch("laplacian_v_closed_form: P0 has the wrong shape");
  const Matrix Df = G.jacobian(x);
  const GrassmannPoint P = from_chart({Df.transpose()}, GrassmannPoint::canonical(n, m));
  const AdaptedFrame F = adapted_frame(P, P0);

  // Coordinate preimages c_k of the adapted tangent vectors: J c_k = a_k.
  const Matrix J = graph_jacobian_frame(Df);
  const Matrix g = J.transpose() * J;
  const Matrix C = g.ldlt().solve(J.transpose() * F.tangent.transpose());  // n x n, columns c_k
  const auto H = G.hessian(x);
  std::vector<Matrix> second(m);
  for (int b = 0; b < m; ++b) second[b] = C.transpose() * H[b] * C;

  HTensor h(n, m);
  for (int a = 0; a < m; ++a)
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) {
        double s = 0.0;
        for (int b = 0; b < m; ++b) s += F.normal(a, n + b) * second[b](k, l);
        h.set(a, k, l, s);
      }
  return laplacian_v(LambdaProfile::make(n, F.lambdas), h);
}

double laplacian_v_finite_difference(const GraphImmersion& G, const Vector& x, const GrassmannPoint& P0,
                                     double step) {
  if (!(step > 0.0)) throw PreconditionViolated("laplacian_v_finite_difference: step must be positive");
  const int n = G.n();
  G.require_domain(x);
  auto e = [n](int i) { return Vector::Unit(n, i); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (double si : {-2.0, 2.0})
        for (double sj : {-2.0, 2.0})
          if (!G.in_domain(x + step * (si * e(i) + sj * e(j))))
            throw OutOfDomain("laplacian_v_finite_difference: stencil leaves the domain");

  const double h = step;
  auto u = [&](const Vector& y) { return v_along_gauss(G, y, P0); };
  const double u0 = u(x);
  std::vector<double> up(n), um(n);
  for (int i = 0; i < n; ++i) {
    up[i] = u(x + h * e(i));
    um[i] = u(x - h * e(i));
  }
  // corner[i][j][s] for s = (+i+j, +i-j, -i+j, -i-j).
  std::vector<std::array<double, 4>> corner(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double pp = u(x + h * (e(i) + e(j)));
      const double pm = u(x + h * (e(i) - e(j)));
      const double mp = u(x + h * (-e(i) + e(j)));
      const double mm = u(x - h * (e(i) + e(j)));
      corner[i * n + j] = {pp, pm, mp, mm};
      corner[j * n + i] = {pp, mp, pm, mm};
    }

  double divergence = 0.0;
  for (int i = 0; i < n; ++i) {
    const Matrix Ap = flux_coefficients(G, x + 0.5 * h * e(i));
    const Matrix Am = flux_coefficients(G, x - 0.5 * h * e(i));
    double flux_p = Ap(i, i) * (up[i] - u0) / h;
    double flux_m = Am(i, i) * (u0 - um[i]) / h;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto& c = corner[i * n + j];
      const double centre = up[j] - um[j];
      flux_p += Ap(i, j) * (centre + c[0] - c[1]) / (4.0 * h);
      flux_m += Am(i, j) * (centre + c[2] - c[3]) / (4.0 * h);
    }
    divergence += (flux_p - flux_m) / h;
  }
  const Matrix Df = G.jacobian(x);
  const double sqrtG = std::sqrt((Matrix::Identity(n, n) + Df.transpose() * Df).determinant());
  return divergence / sqrtG;
}

// ------------------------------------------------------------ ellipticity

EllipticityResult ellipticity_check(const GraphImmersion& G, const Vector& center, double radius,
                                    std::size_t samples, std::uint64_t seed) {
  const int n = G.n();
  if (center.size() != n) throw DimensionMismatch("ellipticity_check: center has wrong dimension");
  EllipticityResult r;
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.max_ratio = -std::numeric_limits<double>::infinity();
  Engine rng = substream(seed, 0);
  for (std::size_t s = 0; s < samples; ++s) {
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = gaussian(rng);
    const Vector x = center + radius * std::pow(uniform(rng), 1.0 / n) * d / d.norm();
    if (!G.in_domain(x)) continue;
    const Matrix A = flux_coefficients(G, x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
    r.min_ratio = std::min(r.min_ratio, es.eigenvalues()(0));
    r.max_ratio = std::max(r.max_ratio, es.eigenvalues()(n - 1));
    const Matrix Df = G.jacobian(x);
    r.sup_slope = std::max(r.sup_slope, std::sqrt((Matrix::Identity(n, n) + Df.transpose() * Df).determinant()));
    ++r.samples;
  }
  return r;
}

// ------------------------------------------------------ mean Gauss image

MeanGaussImage mean_gauss_image(const GraphImmersion& G, const Vector& center, double radius,
                                const GrassmannPoint& P0, int order) {
  const int n = G.n(), m = G.m();
  if (center.size() != n) throw DimensionMismatch("mean_gauss_image: center has wrong dimension");
  if (P0.n() != n || P0.m() != m) throw DimensionMismatch("mean_gauss_image: P0 has the wrong shape");
  if (order < 1 || !(radius > 0.0)) throw PreconditionViolated("mean_gauss_image: need order >= 1, radius > 0");

  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)), gsl_integration_glfixed_table_free);
  auto rule = [&](double a, double b) {
    std::vector<std::pair<double, double>> nodes(order);
    for (int k = 0; k < order; ++k)
      gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(k), &nodes[k].first, &nodes[k].second,
                                    table.get());
    return nodes;
  };
  // Hyperspherical coordinates: r, phi_1..phi_{n-2} in [0, pi], phi_{n-1} in [0, 2 pi).
  std::vector<std::vector<std::pair<double, double>>> axes;
  if (n == 1) {
    axes.push_back(rule(-radius, radius));
  } else {
    axes.push_back(rule(0.0, radius));
    for (int k = 1; k <= n - 2; ++k) axes.push_back(rule(0.0, std::numbers::pi));
    axes.push_back(rule(0.0, 2.0 * std::numbers::pi));
  }

  MeanGaussImage result;
  Vector sum = Vector::Zero(n * m);
  double weight_sum = 0.0;
  std::vector<int> idx(n, 0);
  while (true) {
    Vector offset(n);
    double jac = 1.0;
    if (n == 1) {
      offset(0) = axes[0][idx[0]].first;
      jac = axes[0][idx[0]].second;
    } else {
      const double r = axes[0][idx[0]].first;
      jac = axes[0][idx[0]].second * std::pow(r, n - 1);
      double sin_prod = 1.0;
      for (int k = 1; k <= n - 1; ++k) {
        const double phi = axes[k][idx[k]].first;
        jac *= axes[k][idx[k]].second;
        if (k <= n - 2) jac *= std::pow(std::sin(phi), n - 1 - k);
        offset(k - 1) = r * sin_prod * std::cos(phi);
        sin_prod *= std::sin(phi);
      }
      offset(n - 1) = r * sin_prod;
    }
    const Vector x = center + offset;
    if (G.in_domain(x)) {
      const Matrix Df = G.jacobian(x);
      const GrassmannPoint P = from_chart({Df.transpose()}, GrassmannPoint::canonical(n, m));
      const Matrix Z = to_chart(P, P0).Z;
      const double sqrtG = std::sqrt((Matrix::Identity(n, n) + Df.transpose() * Df).determinant());
      const double w = jac * sqrtG;
      sum += w * t_embedding(Z);
      weight_sum += w;
      result.sup_v = std::max(result.sup_v, v_of_chart(Z));
      ++result.nodes;
    }
    int k = 0;
    while (k < n && ++idx[k] == order) idx[k++] = 0;
    if (k == n) break;
  }
  if (result.nodes == 0 || !(weight_sum > 0.0))
    throw OutOfDomain("mean_gauss_image: no quadrature node inside the domain");
  const Matrix Z = t_embedding_inverse(sum / weight_sum, n, m);
  result.plane = from_chart({Z}, P0);
  result.v = v_value(result.plane, P0);
  return result;
}

}  // namespace gbl
