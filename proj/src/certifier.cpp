#include "gbl/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gbl/optimize.hpp"

namespace gbl {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double min_eigenvalue(const Matrix& A) {
  if (A.rows() == 1) return A(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void require_match(const LambdaProfile& lambda, const HTensor& h, const char* what) {
  if (lambda.n != h.n() || lambda.m != h.m() || lambda.lambdas.size() != h.m())
    throw DimensionMismatch(std::string(what) + ": lambda profile and h tensor disagree in (n, m)");
}

// Calls visit(indices) for every non-increasing index tuple of length m with
// entries in [0, points).
template <class Visit>
void for_each_sorted_tuple(int m, int points, Visit visit) {
  std::vector<int> idx(m, points - 1);
  while (true) {
    visit(idx);
    int k = m - 1;
    while (k >= 0 && idx[k] == 0) --k;
    if (k < 0) return;
    --idx[k];
    for (int j = k + 1; j < m; ++j) idx[j] = idx[k];
  }
}

}  // namespace

// ---------------------------------------------------------------- HTensor

HTensor::HTensor(int n, int m) : n_(n), m_(m) {
  if (n < 1 || m < 1) throw DimensionMismatch("HTensor: need n, m >= 1");
  data_.assign(flat_size(n, m), 0.0);
}

int HTensor::flat_index(int n, int alpha, int i, int j) {
  if (i > j) std::swap(i, j);
  return alpha * (n * (n + 1) / 2) + i * n - i * (i - 1) / 2 + (j - i);
}

std::size_t HTensor::offset(int alpha, int i, int j) const {
  return static_cast<std::size_t>(flat_index(n_, alpha, i, j));
}

double HTensor::norm2() const {
  double s = 0.0;
  for (int a = 0; a < m_; ++a)
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const double x = (*this)(a, i, j);
        s += x * x;
      }
  return s;
}

Vector HTensor::flatten() const {
  Vector y(static_cast<Eigen::Index>(data_.size()));
  for (int a = 0; a < m_; ++a)
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        const int k = flat_index(n_, a, i, j);
        y(k) = (i == j ? 1.0 : std::numbers::sqrt2) * data_[k];
      }
  return y;
}

HTensor HTensor::unflatten(int n, int m, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != flat_size(n, m))
    throw DimensionMismatch("HTensor::unflatten: wrong vector length");
  HTensor h(n, m);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const int k = flat_index(n, a, i, j);
        h.data_[k] = (i == j ? 1.0 : kInvSqrt2) * y(k);
      }
  return h;
}

HTensor HTensor::random(Engine& rng, int n, int m) {
  HTensor h(n, m);
  for (auto& x : h.data_) x = gaussian(rng);
  return h;
}

// ---------------------------------------------------------- LambdaProfile

double v_of_lambdas(const Vector& lambdas) {
  double log_v = 0.0;
  for (Eigen::Index a = 0; a < lambdas.size(); ++a) log_v += 0.5 * std::log1p(lambdas(a) * lambdas(a));
  return std::exp(log_v);
}

LambdaProfile LambdaProfile::make(int n, const Vector& lambdas) {
  const int m = static_cast<int>(lambdas.size());
  if (m < 1 || m > n) throw DimensionMismatch("LambdaProfile: need 1 <= m <= n");
  for (Eigen::Index a = 0; a < lambdas.size(); ++a)
    if (!std::isfinite(lambdas(a)) || lambdas(a) < 0.0)
      throw PreconditionViolated("LambdaProfile: lambdas must be finite and nonnegative");
  LambdaProfile p;
  p.n = n;
  p.m = m;
  p.lambdas = lambdas;
  p.v = v_of_lambdas(lambdas);
  return p;
}

// ------------------------------------------------------------ Delta v

double laplacian_v(const LambdaProfile& lambda, const HTensor& h) {
  require_match(lambda, h, "laplacian_v");
  const int n = h.n(), m = h.m();
  const Vector& l = lambda.lambdas;
  double s = h.norm2();
  for (int a = 0; a < m; ++a)
    for (int j = 0; j < n; ++j) s += 2.0 * l(a) * l(a) * h(a, a, j) * h(a, a, j);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      const double c = l(a) * l(b);
      for (int j = 0; j < n; ++j) s += c * (h(a, a, j) * h(b, b, j) + h(a, b, j) * h(b, a, j));
    }
  return lambda.v * s;
}

Matrix quadratic_form_matrix(const LambdaProfile& lambda) {
  const int n = lambda.n, m = lambda.m;
  const Vector& l = lambda.lambdas;
  const double v = lambda.v;
  const auto N = static_cast<Eigen::Index>(HTensor::flat_size(n, m));
  Matrix M = Matrix::Zero(N, N);
  // Adds c * h_p * h_q with h = s * y, s = 1 on the diagonal and 1/sqrt2 off it.
  auto add = [&](int a, int i, int j, int b, int k, int l2, double c) {
    const int p = HTensor::flat_index(n, a, i, j);
    const int q = HTensor::flat_index(n, b, k, l2);
    const double sp = i == j ? 1.0 : kInvSqrt2;
    const double sq = k == l2 ? 1.0 : kInvSqrt2;
    const double w = 0.5 * c * sp * sq;
    M(p, q) += w;
    M(q, p) += w;
  };
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) add(a, i, j, a, i, j, v);
  for (int a = 0; a < m; ++a)
    for (int j = 0; j < n; ++j) add(a, a, j, a, a, j, 2.0 * v * l(a) * l(a));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      const double c = v * l(a) * l(b);
      for (int j = 0; j < n; ++j) {
        add(a, a, j, b, b, j, c);
        add(a, b, j, b, a, j, c);
      }
    }
  return M;
}

double TermDecomposition::total() const {
  double s = pure_high;
  for (double x : I_terms) s += x;
  for (const auto& t : II_terms) s += t.value;
  for (const auto& t : III_terms) s += t.value;
  for (double x : IV_terms) s += x;
  return s;
}

TermDecomposition decompose_terms(const LambdaProfile& lambda, const HTensor& h) {
  require_match(lambda, h, "decompose_terms");
  const int n = h.n(), m = h.m();
  const Vector& l = lambda.lambdas;
  auto sq = [](double x) { return x * x; };
  TermDecomposition t;

  for (int a = 0; a < m; ++a)
    for (int i = m; i < n; ++i)
      for (int j = m; j < n; ++j) t.pure_high += sq(h(a, i, j));

  for (int j = m; j < n; ++j) {
    double s = 0.0;
    for (int a = 0; a < m; ++a) s += (2.0 + 2.0 * sq(l(a))) * sq(h(a, a, j));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (a != b) s += l(a) * l(b) * h(a, a, j) * h(b, b, j);
    t.I_terms.push_back(s);
  }

  for (int j = m; j < n; ++j)
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        const double x = h(a, b, j), y = h(b, a, j);
        t.II_terms.push_back({j, a, b, 2.0 * x * x + 2.0 * y * y + 2.0 * l(a) * l(b) * x * y});
      }

  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int g = b + 1; g < m; ++g) {
        const double x = h(a, b, g), y = h(b, g, a), z = h(g, a, b);
        const double value = 2.0 * (x * x + y * y + z * z) + 2.0 * l(a) * l(b) * x * y +
                             2.0 * l(b) * l(g) * y * z + 2.0 * l(g) * l(a) * z * x;
        t.III_terms.push_back({a, b, g, value});
      }

  for (int a = 0; a < m; ++a) {
    double s = (1.0 + 2.0 * sq(l(a))) * sq(h(a, a, a));
    for (int b = 0; b < m; ++b) {
      if (b == a) continue;
      s += sq(h(a, b, b)) + (2.0 + 2.0 * sq(l(b))) * sq(h(b, b, a));
      s += 2.0 * l(a) * l(b) * h(a, b, b) * h(b, b, a);
    }
    for (int b = 0; b < m; ++b)
      for (int g = 0; g < m; ++g)
        if (b != g) s += l(b) * l(g) * h(b, b, a) * h(g, g, a);
    t.IV_terms.push_back(s);
  }
  return t;
}

// -------------------------------------------------------------- blocks

Matrix form_block_I(const LambdaProfile& lambda) {
  const Vector& l = lambda.lambdas;
  Matrix B = 0.5 * l * l.transpose();
  for (int a = 0; a < lambda.m; ++a) B(a, a) = 1.0 + l(a) * l(a);
  return lambda.v * B;
}

Matrix form_block_II(const LambdaProfile& lambda, int alpha, int beta) {
  const double c = 0.5 * lambda.lambdas(alpha) * lambda.lambdas(beta);
  Matrix B(2, 2);
  B << 1.0, c, c, 1.0;
  return lambda.v * B;
}

Matrix form_block_III(const LambdaProfile& lambda, int alpha, int beta, int gamma) {
  const Vector& l = lambda.lambdas;
  Matrix B = Matrix::Identity(3, 3);
  B(0, 1) = B(1, 0) = 0.5 * l(alpha) * l(beta);
  B(1, 2) = B(2, 1) = 0.5 * l(beta) * l(gamma);
  B(0, 2) = B(2, 0) = 0.5 * l(gamma) * l(alpha);
  return lambda.v * B;
}

// Variables: y0 = h_{a,aa}; u_b = h_{a,bb}; z_b = sqrt2 h_{b,ba}, for b != a.
Matrix form_block_IV(const LambdaProfile& lambda, int alpha) {
  const Vector& l = lambda.lambdas;
  const int m = lambda.m;
  const int k = m - 1;
  Matrix B = Matrix::Zero(2 * k + 1, 2 * k + 1);
  B(0, 0) = 1.0 + 2.0 * l(alpha) * l(alpha);
  std::vector<int> others;
  for (int b = 0; b < m; ++b)
    if (b != alpha) others.push_back(b);
  for (int p = 0; p < k; ++p) {
    const int b = others[p];
    const int u = 1 + p, z = 1 + k + p;
    B(u, u) = 1.0;
    B(z, z) = 1.0 + l(b) * l(b);
    B(0, z) = B(z, 0) = l(alpha) * l(b) * kInvSqrt2;
    B(u, z) = B(z, u) = l(alpha) * l(b) * kInvSqrt2;
    for (int q = 0; q < k; ++q) {
      if (q == p) continue;
      B(z, 1 + k + q) = 0.5 * l(b) * l(others[q]);
    }
  }
  return lambda.v * B;
}

double min_form_eigenvalue(const LambdaProfile& lambda) {
  const int n = lambda.n, m = lambda.m;
  const Vector& l = lambda.lambdas;
  double best = std::numeric_limits<double>::infinity();
  if (n > m) {
    best = std::min(best, lambda.v);
    best = std::min(best, min_eigenvalue(form_block_I(lambda)));
    double largest = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) largest = std::max(largest, l(a) * l(b));
    if (m >= 2) best = std::min(best, lambda.v * (1.0 - 0.5 * largest));
  }
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int g = b + 1; g < m; ++g) best = std::min(best, min_eigenvalue(form_block_III(lambda, a, b, g)));
  for (int a = 0; a < m; ++a) best = std::min(best, min_eigenvalue(form_block_IV(lambda, a)));
  return best;
}

// ------------------------------------------------------------ sampling

Vector project_admissible(const Vector& lambdas, double v_bound) {
  const double target = 2.0 * std::log(v_bound);
  auto log_prod = [&](double s) {
    double x = 0.0;
    for (Eigen::Index a = 0; a < lambdas.size(); ++a) x += std::log1p(s * s * lambdas(a) * lambdas(a));
    return x;
  };
  if (log_prod(1.0) <= target) return lambdas;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 64 && hi - lo > 2e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_prod(mid) <= target ? lo : hi) = mid;
  }
  return lo * lambdas;
}

Vector sample_admissible_lambdas(Engine& rng, int m, double v_bound) {
  if (v_bound < 1.0) throw PreconditionViolated("sample_admissible_lambdas: v_bound < 1");
  const double lmax = std::sqrt(std::max(0.0, v_bound * v_bound - 1.0));
  Vector l(m);
  for (int a = 0; a < m; ++a) l(a) = uniform(rng, 0.0, lmax);
  const bool to_boundary = uniform(rng) < 0.25;
  if (to_boundary && l.norm() > 0.0) {
    // Expand first so the projection lands on the boundary.
    const Vector big = l * (10.0 * lmax / l.norm() + 1.0);
    return project_admissible(big, v_bound);
  }
  return project_admissible(l, v_bound);
}

// ------------------------------------------------------------------ K0

namespace {

struct AuditPartial {
  double min_ratio = std::numeric_limits<double>::infinity();
  double min_eig = std::numeric_limits<double>::infinity();
  Vector min_eig_lambdas;
};

CertificateReport minimize_form(int n, int m, double beta0, const K0Options& options) {
  CertificateReport report;
  report.n = n;
  report.m = m;
  report.beta0 = beta0;
  const double lmax = std::sqrt(std::max(0.0, beta0 * beta0 - 1.0));
  long evaluations = 0;

  auto objective = [&](const Vector& raw) {
    ++evaluations;
    const Vector l = project_admissible(raw.cwiseAbs(), beta0);
    return min_form_eigenvalue(LambdaProfile::make(n, l));
  };

  struct Candidate {
    double value;
    Vector lambdas;
  };
  std::vector<Candidate> pool;
  auto consider = [&](const Vector& l) {
    const Vector p = project_admissible(l.cwiseAbs(), beta0);
    pool.push_back({objective(p), p});
  };

  const int G = std::max(2, options.grid_points);
  for_each_sorted_tuple(m, G, [&](const std::vector<int>& idx) {
    Vector l(m);
    for (int a = 0; a < m; ++a) l(a) = lmax * idx[a] / (G - 1);
    consider(l);
  });
  for (const auto& s : options.extra_starts)
    if (s.size() == m) consider(s);

  std::stable_sort(pool.begin(), pool.end(),
                   [](const Candidate& x, const Candidate& y) { return x.value < y.value; });
  Candidate best = pool.front();
  report.min_eigenvalue_trace.push_back(best.value);

  // Warm starts always get polished, on top of the best grid points.
  std::vector<Vector> starts;
  for (int k = 0; k < options.polish_starts && k < static_cast<int>(pool.size()); ++k)
    starts.push_back(pool[k].lambdas);
  for (const auto& s : options.extra_starts)
    if (s.size() == m) starts.push_back(project_admissible(s.cwiseAbs(), beta0));

  bool exhausted = false;
  if (lmax > 0.0) {
    for (const auto& start : starts) {
      if (evaluations > options.max_evaluations) {
        exhausted = true;
        break;
      }
      const auto r = nelder_mead(objective, start, lmax / (G - 1), options.polish_iterations, 1e-13);
      if (r.value < best.value) best = {r.value, project_admissible(r.x.cwiseAbs(), beta0)};
      report.min_eigenvalue_trace.push_back(best.value);
    }
  }

  // Monte Carlo audit: random directions h bound the form from above, and
  // exact evaluations at random lambda may only lower the estimate.
  const std::size_t total = options.audit_samples;
  const auto audit = parallel_chunks(
      total, AuditPartial{},
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Engine rng = substream(options.seed, chunk);
        AuditPartial part;
        for (std::size_t s = begin; s < end; ++s) {
          const Vector l = sample_admissible_lambdas(rng, m, beta0);
          const LambdaProfile p = LambdaProfile::make(n, l);
          const HTensor h = HTensor::random(rng, n, m);
          part.min_ratio = std::min(part.min_ratio, laplacian_v(p, h) / h.norm2());
          if (s % 64 == 0) {
            const double e = min_form_eigenvalue(p);
            if (e < part.min_eig) {
              part.min_eig = e;
              part.min_eig_lambdas = l;
            }
          }
        }
        return part;
      },
      [](const AuditPartial& x, const AuditPartial& y) {
        if (y.min_eig < x.min_eig) {
          AuditPartial r = y;
          r.min_ratio = std::min(x.min_ratio, y.min_ratio);
          return r;
        }
        AuditPartial r = x;
        r.min_ratio = std::min(x.min_ratio, y.min_ratio);
        return r;
      });
  evaluations += static_cast<long>(total / 64);
  if (audit.min_eig < best.value) best = {audit.min_eig, audit.min_eig_lambdas};
  report.min_eigenvalue_trace.push_back(best.value);

  report.K0 = best.value;
  report.argmin_lambda = LambdaProfile::make(n, best.lambdas);
  report.sample_count = total;
  report.audit_min_ratio = total > 0 ? audit.min_ratio : std::numeric_limits<double>::infinity();
  report.worst_violation = total > 0 ? audit.min_ratio - report.K0 : 0.0;
  report.full_matrix_check =
      std::abs(min_eigenvalue(quadratic_form_matrix(report.argmin_lambda)) - report.K0);
  report.evaluations = evaluations;
  report.budget_exhausted = exhausted || evaluations > options.max_evaluations;
  return report;
}

void check_dims(int n, int m) {
  if (m < 1 || m > n) throw DimensionMismatch("compute_K0: need 1 <= m <= n");
}

}  // namespace

CertificateReport compute_K0(int n, int m, double beta0, const K0Options& options) {
  check_dims(n, m);
  if (!(beta0 >= 1.0 && beta0 < 3.0)) throw PreconditionViolated("compute_K0: need 1 <= beta0 < 3");
  return minimize_form(n, m, beta0, options);
}

CertificateReport boundary_probe(int n, int m, const K0Options& options) {
  check_dims(n, m);
  return minimize_form(n, m, 3.0, options);
}

std::vector<CertificateReport> sweep_K0(int n, int m, const std::vector<double>& betas,
                                        const K0Options& options) {
  if (!std::is_sorted(betas.begin(), betas.end()))
    throw PreconditionViolated("sweep_K0: beta0 values must be non-decreasing");
  std::vector<CertificateReport> out;
  K0Options opts = options;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    opts.seed = splitmix64(options.seed + k);
    out.push_back(compute_K0(n, m, betas[k], opts));
    opts.extra_starts.push_back(out.back().argmin_lambda.lambdas);
  }
  return out;
}

}  // namespace gbl
