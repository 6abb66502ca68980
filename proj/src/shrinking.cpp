#include "gbl/shrinking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "gbl/optimize.hpp"

namespace gbl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// v(P, Q), +inf when the pairing is not positive.
double v_or_inf(const GrassmannPoint& P, const GrassmannPoint& Q) {
  const double w = w_pairing(P, Q);
  return w > 1e-300 ? 1.0 / w : kInf;
}

void require_same_shape(const GrassmannPoint& P, const GrassmannPoint& Q, const char* where) {
  if (P.n() != Q.n() || P.m() != Q.m()) throw DimensionMismatch(std::string(where) + ": planes differ in shape");
}

double log_sec_sum(const Vector& thetas, double scale) {
  double s = 0.0;
  for (Eigen::Index a = 0; a < thetas.size(); ++a) s -= std::log(std::cos(thetas(a) * scale));
  return s;
}

// Scale s with v_of_chart(s Z) = level, for level >= 1 and Z != 0.
double scale_to_level(const Matrix& Z, double level) {
  const double hi = std::sqrt(std::max(0.0, level * level - 1.0)) / Z.norm();
  double lo = 0.0, up = hi;
  for (int it = 0; it < 200 && up - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + up);
    (v_of_chart(mid * Z) <= level ? lo : up) = mid;
  }
  return lo;
}

GrassmannPoint t_mean(const std::vector<GrassmannPoint>& cloud, const GrassmannPoint& P) {
  Vector sum = Vector::Zero(P.n() * P.m());
  for (const auto& X : cloud) sum += t_embedding(to_chart(X, P).Z);
  return from_chart({t_embedding_inverse(sum / static_cast<double>(cloud.size()), P.n(), P.m())}, P);
}

double max_v(const std::vector<GrassmannPoint>& cloud, const GrassmannPoint& P) {
  double worst = 1.0;
  for (const auto& X : cloud) worst = std::max(worst, v_or_inf(X, P));
  return worst;
}

}  // namespace

double shrink_threshold(double a) { return std::numbers::sqrt2 / std::sqrt(1.0 + 1.0 / a); }

ShrinkParameters ShrinkParameters::make(double a, double b, double beta0) {
  if (!(a > 1.0)) throw PreconditionViolated("shrink parameters: need a > 1");
  if (!(b >= 1.0 && b <= beta0 && beta0 < a))
    throw PreconditionViolated("shrink parameters: need 1 <= b <= beta0 < a");
  ShrinkParameters p;
  p.a = a;
  p.b = b;
  p.beta0 = beta0;
  p.alpha = std::acos(1.0 / a);
  p.beta = std::acos(1.0 / b);
  p.gamma = p.alpha - p.beta;
  p.c = 1.0 / std::cos(p.gamma);
  p.threshold = shrink_threshold(a);
  return p;
}

std::string to_string(ShrinkCase c) {
  switch (c) {
    case ShrinkCase::TrivialCenter: return "TrivialCenter";
    case ShrinkCase::CaseI: return "CaseI";
    case ShrinkCase::CaseII: return "CaseII";
  }
  return "unknown";
}

double sec_product(const Vector& thetas, double s) {
  const double L = thetas.norm();
  if (L == 0.0) return 1.0;
  return std::exp(log_sec_sum(thetas, s / L));
}

ShrinkResult shrink_center(const GrassmannPoint& P1, const GrassmannPoint& Q, const ShrinkParameters& params) {
  require_same_shape(P1, Q, "shrink_center");
  const double vQ = v_or_inf(Q, P1);
  if (!(vQ <= params.b * (1.0 + 1e-12)))
    throw PreconditionViolated("shrink_center: v(Q, P1) = " + std::to_string(vQ) + " exceeds b");
  ShrinkResult r;
  r.P2 = Q;
  if (params.b < params.threshold || vQ < params.c) {
    r.kind = params.b < params.threshold ? ShrinkCase::TrivialCenter : ShrinkCase::CaseI;
    r.new_bound_on_Q = 1.0;
    r.epsilon1 = params.b - 1.0;
    return r;
  }
  r.kind = ShrinkCase::CaseII;
  const Vector thetas = jordan_decompose(Q, P1).thetas;
  r.L = thetas.norm();
  const double log_c = std::log(params.c);
  auto f = [&](double t) { return log_sec_sum(thetas, (r.L - t) / r.L) - log_c; };
  if (f(0.0) <= 0.0) {
    r.t0 = 0.0;
  } else {
    r.t0 = bisect_root(f, 0.0, r.L, 1e-12);
  }
  r.P2 = geodesic(Q, P1, r.t0);
  r.new_bound_on_Q = v_or_inf(Q, r.P2);
  r.epsilon1 = params.b - r.new_bound_on_Q;
  return r;
}

ContainmentResult containment_check(const GrassmannPoint& P1, const GrassmannPoint& P2,
                                    const ShrinkParameters& params, std::size_t samples, std::uint64_t seed) {
  require_same_shape(P1, P2, "containment_check");
  const int n = P1.n(), m = P1.m(), d = n * m;
  const double rho = std::sqrt(params.b * params.b - 1.0);
  const std::size_t max_proposals_per_sample = 2000;
  ContainmentResult init;
  init.worst_margin = kInf;
  auto body = [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Engine rng = substream(seed, chunk);
    ContainmentResult part = init;
    const std::size_t cap = (end - begin) * max_proposals_per_sample;
    while (part.accepted < end - begin && part.proposals < cap) {
      ++part.proposals;
      Matrix Z(n, m);
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) Z(i, a) = gaussian(rng);
      const double norm = Z.norm();
      if (norm == 0.0) continue;
      Z *= rho * std::pow(uniform(rng), 1.0 / d) / norm;
      if (v_of_chart(Z) > params.b) continue;
      ++part.accepted;
      part.worst_margin = std::min(part.worst_margin, params.a - v_or_inf(from_chart({Z}, P1), P2));
      if (Z.norm() > 0.0) {
        const Matrix edge = scale_to_level(Z, params.b) * Z;
        part.worst_margin = std::min(part.worst_margin, params.a - v_or_inf(from_chart({edge}, P1), P2));
      }
    }
    return part;
  };
  auto merge = [](ContainmentResult acc, const ContainmentResult& p) {
    acc.worst_margin = std::min(acc.worst_margin, p.worst_margin);
    acc.accepted += p.accepted;
    acc.proposals += p.proposals;
    return acc;
  };
  if (params.b <= 1.0) {
    ContainmentResult r;
    r.accepted = r.proposals = samples;
    r.worst_margin = params.a - v_or_inf(P1, P2);
    return r;
  }
  return parallel_chunks(samples, init, body, merge, 1024);
}

// --------------------------------------------------------------- epsilon1

double epsilon2_objective(double a, double b, const Vector& thetas) {
  const double threshold = shrink_threshold(a);
  if (!(b >= threshold && b < a)) return kInf;
  for (Eigen::Index k = 0; k < thetas.size(); ++k)
    if (!(thetas(k) >= 0.0 && thetas(k) < std::numbers::pi / 2)) return kInf;
  const double c = 1.0 / std::cos(std::acos(1.0 / a) - std::acos(1.0 / b));
  const double log_c = std::log(c);
  const double total = log_sec_sum(thetas, 1.0);
  if (total < log_c * (1.0 - 1e-14) || total > std::log(b) * (1.0 + 1e-14)) return kInf;
  const double L = thetas.norm();
  if (L == 0.0) return b - 1.0;
  // s = L - t0 solves prod sec(theta s / L) = c.
  double lo = 0.0, hi = L;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * L; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_sec_sum(thetas, mid / L) < log_c ? lo : hi) = mid;
  }
  const double t0 = L - 0.5 * (lo + hi);
  return b - std::exp(log_sec_sum(thetas, t0 / L));
}

Epsilon1Result compute_epsilon1(double a, double beta0, int n, int m, const Epsilon1Options& options) {
  if (!(a > 1.0) || !(beta0 >= 1.0 && beta0 < a))
    throw PreconditionViolated("compute_epsilon1: need a > 1 and 1 <= beta0 < a");
  if (n < 1 || m < 1) throw PreconditionViolated("compute_epsilon1: need n, m >= 1");
  Epsilon1Result r;
  r.a = a;
  r.beta0 = beta0;
  r.angles = std::min(n, m);
  const double threshold = shrink_threshold(a);
  r.first_branch = threshold - 1.0;
  r.epsilon2 = kInf;
  r.argmin_thetas = Vector::Zero(r.angles);
  if (beta0 < threshold) {
    r.omega_empty = true;
    r.epsilon1 = r.first_branch;
    return r;
  }

  const int p = r.angles;
  const int R = options.theta_points > 0 ? options.theta_points : (p <= 3 ? 64 : 32);
  const int B = beta0 > threshold ? std::max(1, options.b_points) : 1;
  const double theta_max = std::acos(1.0 / beta0);
  std::vector<double> bs(B);
  for (int k = 0; k < B; ++k) bs[k] = B == 1 ? threshold : threshold + (beta0 - threshold) * k / (B - 1);

  struct Candidate {
    double value;
    double b;
    Vector thetas;
  };
  std::vector<Candidate> best;
  auto consider = [&](double value, double b, const Vector& th) {
    if (!std::isfinite(value)) return;
    if (value < r.epsilon2) {
      r.epsilon2 = value;
      r.argmin_b = b;
      r.argmin_thetas = th;
    }
    best.push_back({value, b, th});
    if (best.size() > static_cast<std::size_t>(8 * std::max(1, options.polish_starts))) {
      std::sort(best.begin(), best.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
      best.resize(std::max(1, options.polish_starts));
    }
  };

  // The b = threshold slice, where c = b and t0 = 0.
  {
    Vector slice = Vector::Zero(p);
    slice(0) = std::acos(1.0 / threshold);
    ++r.evaluations;
    consider(epsilon2_objective(a, threshold, slice), threshold, slice);
  }

  // Descending tuples only: F is symmetric in the angles.
  std::vector<int> idx(p, 0);
  Vector th(p);
  bool done = false;
  while (!done && !r.budget_exhausted) {
    for (int k = 0; k < p; ++k) th(k) = theta_max * idx[k] / (R - 1);
    for (double b : bs) {
      if (r.evaluations >= options.max_evaluations) {
        r.budget_exhausted = true;
        break;
      }
      ++r.evaluations;
      consider(epsilon2_objective(a, b, th), b, th);
    }
    // Next tuple with idx[0] >= idx[1] >= ... >= idx[p-1].
    int k = p - 1;
    while (k >= 0) {
      const int limit = k == 0 ? R - 1 : idx[k - 1];
      if (idx[k] < limit) {
        ++idx[k];
        for (int j = k + 1; j < p; ++j) idx[j] = 0;
        break;
      }
      --k;
    }
    if (k < 0) done = true;
  }

  // Polish in (b, theta), projecting onto the outer boundary prod sec <= b.
  std::sort(best.begin(), best.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
  if (best.size() > static_cast<std::size_t>(std::max(0, options.polish_starts)))
    best.resize(std::max(0, options.polish_starts));
  auto unpack = [&](const Vector& x, double& b, Vector& t) {
    b = std::clamp(x(0), threshold, beta0);
    t = x.tail(p).cwiseAbs();
    for (int k = 0; k < p; ++k) t(k) = std::min(t(k), std::numbers::pi / 2 - 1e-9);
    const double target = std::log(b);
    if (log_sec_sum(t, 1.0) > target) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 64 && hi - lo > 2e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (log_sec_sum(t, mid) <= target ? lo : hi) = mid;
      }
      t *= lo;
    }
  };
  for (const auto& cand : best) {
    if (r.budget_exhausted) break;
    Vector x(p + 1);
    x(0) = cand.b;
    x.tail(p) = cand.thetas;
    auto objective = [&](const Vector& y) {
      double b;
      Vector t;
      unpack(y, b, t);
      ++r.evaluations;
      return epsilon2_objective(a, b, t);
    };
    const auto res = nelder_mead(objective, x, 0.02, options.polish_iterations, 1e-12);
    double b;
    Vector t;
    unpack(res.x, b, t);
    const double value = epsilon2_objective(a, b, t);
    if (std::isfinite(value) && value < r.epsilon2) {
      r.epsilon2 = value;
      r.argmin_b = b;
      r.argmin_thetas = t;
    }
  }
  r.epsilon1 = std::min(r.first_branch, r.epsilon2);
  return r;
}

// -------------------------------------------------------------- iteration

IterationTrace iterate(const std::vector<GrassmannPoint>& cloud, const GrassmannPoint& start, double q0_bound,
                       double beta0, double a, double epsilon1) {
  if (cloud.empty()) throw PreconditionViolated("iterate: empty cloud");
  if (!(q0_bound >= 1.0 && q0_bound <= beta0 && beta0 < a))
    throw PreconditionViolated("iterate: need 1 <= q0_bound <= beta0 < a");
  for (const auto& X : cloud) {
    require_same_shape(X, start, "iterate");
    if (!(v_or_inf(X, start) <= q0_bound * (1.0 + 1e-12)))
      throw PreconditionViolated("iterate: cloud point outside the q0_bound sublevel set of start");
  }
  IterationTrace trace;
  trace.threshold = shrink_threshold(a);
  trace.epsilon1 = epsilon1 > 0.0 ? epsilon1 : compute_epsilon1(a, beta0, start.n(), start.m()).epsilon1;
  trace.k_planned = static_cast<int>(std::floor((a - trace.threshold) / trace.epsilon1)) + 1;
  trace.centers.push_back(start);
  trace.bounds.push_back(q0_bound);
  const int cap = 10 * trace.k_planned + 100;
  while (trace.bounds.back() >= trace.threshold) {
    if (trace.k_actual >= cap) throw Stalled("iterate: step budget exhausted");
    const GrassmannPoint& P = trace.centers.back();
    const double b = trace.bounds.back();
    const GrassmannPoint Q = t_mean(cloud, P);
    const auto step = shrink_center(P, Q, ShrinkParameters::make(a, b, beta0));
    const double next = max_v(cloud, step.P2);
    if (b - next < 0.5 * trace.epsilon1)
      throw Stalled("iterate: step " + std::to_string(trace.k_actual + 1) + " lowered the bound from " +
                    std::to_string(b) + " to " + std::to_string(next) + ", less than epsilon1 / 2");
    trace.cases.push_back(step.kind);
    trace.containment.push_back(next);
    trace.centers.push_back(step.P2);
    trace.bounds.push_back(next);
    ++trace.k_actual;
  }
  return trace;
}

// ---------------------------------------------------------------- helpers

GrassmannPoint random_plane_at_level(Engine& rng, const GrassmannPoint& P1, double level) {
  if (!(level >= 1.0)) throw PreconditionViolated("random_plane_at_level: level < 1");
  if (level == 1.0) return P1;
  Matrix Z(P1.n(), P1.m());
  for (int i = 0; i < P1.n(); ++i)
    for (int a = 0; a < P1.m(); ++a) Z(i, a) = gaussian(rng);
  return from_chart({scale_to_level(Z, level) * Z}, P1);
}

std::vector<GrassmannPoint> synthetic_cloud(Engine& rng, const GrassmannPoint& center, double spread,
                                            std::size_t count) {
  std::vector<GrassmannPoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Matrix Z(center.n(), center.m());
    for (int i = 0; i < center.n(); ++i)
      for (int a = 0; a < center.m(); ++a) Z(i, a) = uniform(rng, -spread, spread);
    out.push_back(from_chart({Z}, center));
  }
  return out;
}

std::vector<GrassmannPoint> cloud_from_json(const std::string& text, const GrassmannPoint& P0) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw PreconditionViolated(std::string("cloud: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw PreconditionViolated("cloud: expected a non-empty array of matrices");
  std::vector<GrassmannPoint> out;
  for (const auto& M : j) {
    if (!M.is_array() || static_cast<int>(M.size()) != P0.n())
      throw DimensionMismatch("cloud: each matrix needs n rows");
    Matrix Z(P0.n(), P0.m());
    for (int i = 0; i < P0.n(); ++i) {
      if (!M[i].is_array() || static_cast<int>(M[i].size()) != P0.m())
        throw DimensionMismatch("cloud: each row needs m entries");
      for (int a = 0; a < P0.m(); ++a) {
        if (!M[i][a].is_number()) throw PreconditionViolated("cloud: entries must be numbers");
        Z(i, a) = M[i][a].get<double>();
      }
    }
    out.push_back(from_chart({Z}, P0));
  }
  return out;
}

}  // namespace gbl
