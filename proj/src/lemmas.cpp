#include "gbl/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gbl/optimize.hpp"

namespace gbl {

namespace {

constexpr double kRelSlack = 1e-12;

double min_eigenvalue(const Matrix& A) {
  if (A.rows() == 1) return A(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

struct MinMax {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
};

MinMax merge_minmax(const MinMax& a, const MinMax& b) {
  return {std::min(a.min, b.min), std::max(a.max, b.max)};
}

// IV form normalized by D = diag(1; 1...; 2...), so its smallest eigenvalue is
// the largest eps0 that keeps IV - eps0 D PSD at this lambda.
double generalized_IV(const LambdaProfile& lambda, int alpha) {
  Matrix A = lemma_IV_matrix(lambda, alpha, 0.0);
  const int k = lambda.m - 1;
  for (int p = 0; p < k; ++p) {
    const int z = 1 + k + p;
    A.row(z) *= std::sqrt(0.5);
    A.col(z) *= std::sqrt(0.5);
  }
  return min_eigenvalue(A);
}

struct LambdaSearch {
  double value;
  Vector lambdas;
};

// Minimizes objective over the admissible set: evaluates the grid, then
// polishes the four best grid points.
LambdaSearch minimize_over_admissible(double v_bound, const std::vector<Vector>& grid,
                                      const std::function<double(const Vector&)>& objective) {
  std::vector<LambdaSearch> pool;
  pool.reserve(grid.size());
  for (const auto& l : grid) pool.push_back({objective(l), l});
  std::partial_sort(pool.begin(), pool.begin() + std::min<std::size_t>(4, pool.size()), pool.end(),
                    [](const LambdaSearch& a, const LambdaSearch& b) { return a.value < b.value; });
  LambdaSearch best = pool.front();
  const double lmax = std::sqrt(std::max(0.0, v_bound * v_bound - 1.0));
  if (lmax == 0.0) return best;
  auto wrapped = [&](const Vector& raw) { return objective(project_admissible(raw.cwiseAbs(), v_bound)); };
  for (std::size_t k = 0; k < std::min<std::size_t>(4, pool.size()); ++k) {
    const auto r = nelder_mead(wrapped, pool[k].lambdas, lmax / 16.0, 3000, 1e-13);
    if (r.value < best.value) best = {r.value, project_admissible(r.x.cwiseAbs(), v_bound)};
  }
  return best;
}

std::vector<Vector> admissible_grid(int m, double v_bound, int points) {
  const double lmax = std::sqrt(std::max(0.0, v_bound * v_bound - 1.0));
  std::vector<Vector> out;
  const int G = std::max(2, points);
  // lambda_0 ranges freely; lambda_1 >= lambda_2 >= ... by symmetry.
  std::vector<int> rest(std::max(0, m - 1), G - 1);
  for (int first = 0; first < G; ++first) {
    std::fill(rest.begin(), rest.end(), G - 1);
    while (true) {
      Vector l(m);
      l(0) = lmax * first / (G - 1);
      for (int a = 1; a < m; ++a) l(a) = lmax * rest[a - 1] / (G - 1);
      out.push_back(project_admissible(l, v_bound));
      int k = static_cast<int>(rest.size()) - 1;
      while (k >= 0 && rest[k] == 0) --k;
      if (k < 0) break;
      --rest[k];
      for (std::size_t j = k + 1; j < rest.size(); ++j) rest[j] = rest[k];
    }
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------ pair bound

PairBoundResult lambda_pair_bound_check(double v_bound, std::size_t samples, std::uint64_t seed) {
  if (!(v_bound >= 1.0)) throw PreconditionViolated("lambda_pair_bound_check: v_bound >= 1 required");
  PairBoundResult r;
  r.v_bound = v_bound;
  r.samples = samples;
  const auto mm = parallel_chunks(
      samples, MinMax{},
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Engine rng = substream(seed, chunk);
        MinMax part;
        for (std::size_t s = begin; s < end; ++s) {
          const Vector l = sample_admissible_lambdas(rng, 2, v_bound);
          const double product = l(0) * l(1);
          part.min = std::min(part.min, v_of_lambdas(l) - 1.0 - product);
          part.max = std::max(part.max, product);
        }
        return part;
      },
      merge_minmax);
  r.worst_margin = samples > 0 ? mm.min : 0.0;
  r.max_product = samples > 0 ? mm.max : 0.0;

  const double lmax = std::sqrt(v_bound * v_bound - 1.0);
  if (lmax > 0.0) {
    // On the boundary lambda_b is determined by lambda_a.
    auto neg_product = [&](double t) {
      const double rest = v_bound * v_bound / (1.0 + t * t) - 1.0;
      return -t * std::sqrt(std::max(0.0, rest));
    };
    r.polished_max_product = -brent_minimize(neg_product, 0.0, lmax).value;
  }
  const double s = std::sqrt(v_bound - 1.0);
  const double at_equal = v_of_lambdas(Vector::Constant(2, s)) - 1.0 - s * s;
  r.tightness_gap = std::max(std::abs(at_equal), std::abs(r.polished_max_product - (v_bound - 1.0)));
  return r;
}

// ------------------------------------------------------------------ III

Matrix lemma_III_matrix(const Vector& triple, double v) {
  if (triple.size() != 3) throw DimensionMismatch("lemma_III_matrix: need three lambdas");
  Matrix A = Matrix::Identity(3, 3) * (v - 1.0);
  A(0, 1) = A(1, 0) = triple(0) * triple(1);
  A(1, 2) = A(2, 1) = triple(1) * triple(2);
  A(0, 2) = A(2, 0) = triple(2) * triple(0);
  return A;
}

double verify_III(const Vector& triple, double v) {
  if (triple.size() != 3) throw DimensionMismatch("verify_III: need three lambdas");
  if (triple.minCoeff() < 0.0) throw PreconditionViolated("verify_III: lambdas must be nonnegative");
  const double vt = v_of_lambdas(triple);
  if (vt > v * (1.0 + kRelSlack) || v > 3.0 * (1.0 + kRelSlack))
    throw PreconditionViolated("verify_III: need prod(1 + lambda^2) <= v^2 <= 9");
  return min_eigenvalue(lemma_III_matrix(triple, v));
}

// ---------------------------------------------------------------- Omega

OmegaSupResult verify_omega_sup(double v, double C) {
  if (!(v > 1.0) || !(C >= 1.0) || C > v * v * (1.0 + kRelSlack))
    throw PreconditionViolated("verify_omega_sup: need v > 1 and 1 <= C <= v^2");
  OmegaSupResult r;
  r.bound = 2.0 / (v - 1.0);
  // z = C / (x y) > v forces x y < C / v, impossible when C <= v.
  if (C <= v) {
    r.empty = true;
    r.sup = -std::numeric_limits<double>::infinity();
    r.boundary_value = r.sup;
    return r;
  }
  r.boundary_value = 2.0 / (v - 1.0) + 1.0 / (v - C);
  const double X = C / v;
  constexpr double kEdge = 1.0 - 1e-12;
  auto point = [&](double u, double w, double& x, double& y, double& z) {
    u = std::clamp(u, 0.0, kEdge);
    w = std::clamp(w, 0.0, kEdge);
    x = 1.0 + u * (X - 1.0);
    y = 1.0 + w * (X / x - 1.0);
    z = C / (x * y);
  };
  auto f = [&](double u, double w) {
    double x, y, z;
    point(u, w, x, y, z);
    if (!(z > v) || !(x < v) || !(y < v)) return -std::numeric_limits<double>::infinity();
    return 1.0 / (v - x) + 1.0 / (v - y) + 1.0 / (v - z);
  };
  const int G = 201;
  double best = -std::numeric_limits<double>::infinity();
  double bu = 0.0, bw = 0.0;
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      const double u = kEdge * i / (G - 1), w = kEdge * j / (G - 1);
      const double val = f(u, w);
      if (val > best) {
        best = val;
        bu = u;
        bw = w;
      }
    }
  Vector start(2);
  start << bu, bw;
  const auto polish = nelder_mead([&](const Vector& p) { return -f(p(0), p(1)); }, start, 1.0 / G, 2000, 1e-14);
  if (-polish.value > best) {
    best = -polish.value;
    bu = polish.x(0);
    bw = polish.x(1);
  }
  r.sup = best;
  point(bu, bw, r.x, r.y, r.z);
  return r;
}

// ------------------------------------------------------------------- IV

Matrix lemma_IV_matrix(const LambdaProfile& lambda, int alpha, double eps0) {
  const int m = lambda.m;
  if (alpha < 0 || alpha >= m) throw DimensionMismatch("lemma_IV_matrix: alpha out of range");
  const Vector& l = lambda.lambdas;
  const int k = m - 1;
  Matrix A = Matrix::Zero(2 * k + 1, 2 * k + 1);
  A(0, 0) = 1.0 + 2.0 * l(alpha) * l(alpha) - eps0;
  std::vector<int> others;
  for (int b = 0; b < m; ++b)
    if (b != alpha) others.push_back(b);
  for (int p = 0; p < k; ++p) {
    const int b = others[p];
    const int u = 1 + p, z = 1 + k + p;
    A(u, u) = 1.0 - eps0;
    A(z, z) = 2.0 + 2.0 * l(b) * l(b) - 2.0 * eps0;
    A(0, z) = A(z, 0) = l(alpha) * l(b);
    A(u, z) = A(z, u) = l(alpha) * l(b);
    for (int q = 0; q < k; ++q)
      if (q != p) A(z, 1 + k + q) = l(b) * l(others[q]);
  }
  return A;
}

double verify_IV(const LambdaProfile& lambda, double eps0, int alpha) {
  if (lambda.v > 3.0 * (1.0 + kRelSlack)) throw PreconditionViolated("verify_IV: need prod(1 + lambda^2) <= 9");
  if (!(eps0 >= 0.0 && eps0 < 1.0)) throw PreconditionViolated("verify_IV: need 0 <= eps0 < 1");
  return min_eigenvalue(lemma_IV_matrix(lambda, alpha, eps0));
}

double verify_IV(const LambdaProfile& lambda, double eps0) {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < lambda.m; ++a) best = std::min(best, verify_IV(lambda, eps0, a));
  return best;
}

Epsilon0Result find_epsilon0(int m, double v_bound, int grid_points) {
  if (m < 1) throw DimensionMismatch("find_epsilon0: m >= 1 required");
  if (!(v_bound >= 1.0 && v_bound <= 3.0)) throw PreconditionViolated("find_epsilon0: need 1 <= v_bound <= 3");
  Epsilon0Result r;
  r.m = m;
  r.v_bound = v_bound;
  const std::vector<Vector> grid = admissible_grid(m, v_bound, grid_points);
  // Alpha is the free first index; verify_IV's precondition uses v <= 3 only.
  auto inner = [&](double eps) {
    return minimize_over_admissible(v_bound, grid, [&](const Vector& l) {
      return min_eigenvalue(lemma_IV_matrix(LambdaProfile::make(m, l), 0, eps));
    });
  };

  double lo = 0.0, hi = 1.0;
  LambdaSearch at_lo = inner(lo);
  if (at_lo.value < 0.0) {
    // The form is not PSD even at eps0 = 0; report the failure as is.
    r.eps0 = 0.0;
    r.eps0_high = 0.0;
    r.argmin_lambdas = at_lo.lambdas;
    r.generalized = at_lo.value;
    return r;
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const LambdaSearch s = inner(mid);
    if (s.value >= 0.0) {
      lo = mid;
      at_lo = s;
    } else {
      hi = mid;
    }
    ++r.bisection_steps;
  }
  r.eps0 = lo;
  r.eps0_high = hi;
  r.argmin_lambdas = at_lo.lambdas;
  r.generalized = minimize_over_admissible(v_bound, grid, [&](const Vector& l) {
                    return generalized_IV(LambdaProfile::make(m, l), 0);
                  }).value;
  return r;
}

double iv_sampling_check(int m, double eps0, std::size_t samples, std::uint64_t seed, double v_bound) {
  const auto mm = parallel_chunks(
      samples, MinMax{},
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Engine rng = substream(seed, chunk);
        MinMax part;
        for (std::size_t s = begin; s < end; ++s) {
          const auto p = LambdaProfile::make(m, sample_admissible_lambdas(rng, m, v_bound));
          part.min = std::min(part.min, verify_IV(p, eps0));
        }
        return part;
      },
      merge_minmax);
  return mm.min;
}

// --------------------------------------------------------------- extrema

std::vector<ExtremumRow> auxiliary_extrema() {
  const double C = 1.0;
  std::vector<ExtremumRow> rows;

  {
    auto f = [C](double x) {
      const double a = x + 2.0 * C * C - C;
      return (x + 1.0) * a * a / ((x - C) * (x - C));
    };
    const auto r = brent_minimize(f, C + 1e-6, 100.0);
    const double closed = std::pow(2.0 * C + 1.0, 3) / (C + 1.0);
    rows.push_back({"(x+1)(x+2C^2-C)^2/(x-C)^2 on x>C, C=1", r.value, closed, std::abs(r.value - closed), r.x,
                    C * (2.0 * C + 3.0)});
  }
  {
    auto f = [C](double x) { return (x + 1.0) * (x + 2.0 * C * (C - 1.0)) / (x - 2.0 * C); };
    const auto r = brent_minimize(f, 2.0 * C + 1e-6, 100.0);
    const double closed = 2.0 * C * C + 2.0 * C + 1.0 + 2.0 * C * std::sqrt(4.0 * C + 2.0);
    rows.push_back({"(x+1)(x+2C(C-1))/(x-2C) on x>2C, C=1", r.value, closed, std::abs(r.value - closed), r.x,
                    C * (2.0 + std::sqrt(4.0 * C + 2.0))});
  }
  {
    auto h = [](double t) { return ((t - 10.0) * t + 27.0) * t - 9.0; };
    const auto r = brent_minimize(h, (3.0 + std::sqrt(5.0)) / 2.0, 20.0);
    const double closed = (187.0 - 38.0 * std::sqrt(19.0)) / 27.0;
    rows.push_back({"t^3-10t^2+27t-9 on t>(3+sqrt5)/2", r.value, closed, std::abs(r.value - closed), r.x,
                    (10.0 + std::sqrt(19.0)) / 3.0});
  }
  return rows;
}

// ----------------------------------------------------------------- suite

namespace {

struct SuitePartial {
  double es1 = std::numeric_limits<double>::infinity();
  double es2 = std::numeric_limits<double>::infinity();
  double pair = std::numeric_limits<double>::infinity();
  double III = std::numeric_limits<double>::infinity();
};

}  // namespace

LemmaSuiteResult lemma_sampling_suite(std::size_t samples, std::uint64_t seed, double v_bound) {
  if (!(v_bound >= 1.0 && v_bound <= 3.0)) throw PreconditionViolated("lemma_sampling_suite: need 1 <= v <= 3");
  const auto acc = parallel_chunks(
      samples, SuitePartial{},
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Engine rng = substream(seed, chunk);
        SuitePartial part;
        for (std::size_t s = begin; s < end; ++s) {
          // The pair inequality and the II form, with v at or above the pair's own value.
          const Vector l2 = sample_admissible_lambdas(rng, 2, v_bound);
          const double v2 = v_of_lambdas(l2);
          const double v = uniform(rng) < 0.5 ? v2 : uniform(rng, v2, v_bound);
          const double product = l2(0) * l2(1);
          part.pair = std::min(part.pair, v - 1.0 - product);
          Matrix II(2, 2);
          II << 2.0 - (3.0 - v), product, product, 2.0 - (3.0 - v);
          part.es2 = std::min(part.es2, min_eigenvalue(II));

          const Vector l3 = sample_admissible_lambdas(rng, 3, v_bound);
          const double v3 = v_of_lambdas(l3);
          const double w = uniform(rng) < 0.5 ? v3 : uniform(rng, v3, v_bound);
          part.III = std::min(part.III, verify_III(l3, std::max(w, v3)));

          const int m = 1 + static_cast<int>(s % 4);
          const auto p = LambdaProfile::make(m + 1, sample_admissible_lambdas(rng, m, v_bound));
          const HTensor h = HTensor::random(rng, m + 1, m);
          const auto t = decompose_terms(p, h);
          double sq = 0.0;
          for (int a = 0; a < m; ++a) sq += h(a, a, m) * h(a, a, m);
          part.es1 = std::min(part.es1, t.I_terms[0] - 2.0 * sq);
        }
        return part;
      },
      [](const SuitePartial& a, const SuitePartial& b) {
        return SuitePartial{std::min(a.es1, b.es1), std::min(a.es2, b.es2), std::min(a.pair, b.pair),
                            std::min(a.III, b.III)};
      });
  LemmaSuiteResult r;
  r.samples = samples;
  r.es1_worst = acc.es1;
  r.es2_worst = acc.es2;
  r.pair_worst = acc.pair;
  r.III_worst = acc.III;
  return r;
}

}  // namespace gbl
