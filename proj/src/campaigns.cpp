#include "gbl/campaigns.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <utility>

#include "gbl/certifier.hpp"
#include "gbl/graph_geometry.hpp"
#include "gbl/lemmas.hpp"
#include "gbl/shrinking.hpp"

namespace gbl {

namespace {

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const Matrix& M) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) a.push_back(to_json(Vector(M.row(i).transpose())));
  return a;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vector random_direction(Engine& rng, int n) {
  Vector x(n);
  do {
    for (int i = 0; i < n; ++i) x(i) = gaussian(rng);
  } while (x.norm() == 0.0);
  return x / x.norm();
}

// Fixed tilt of the coordinate plane used where v is constant against it.
GrassmannPoint tilted_reference(int n, int m) {
  Matrix Z = Matrix::Zero(n, m);
  for (int k = 0; k < std::min(n, m); ++k) Z(k, (k + 2) % m) = 0.1 - 0.03 * k;
  return from_chart({Z}, GrassmannPoint::canonical(n, m));
}

struct LaplacianSample {
  Vector x;
  double slope = 1.0, normB2 = 0.0, meanH = 0.0, closed = 0.0, fd = 0.0, rel = 0.0;
};

LaplacianSample compare_laplacians(const GraphImmersion& G, const Vector& x, const GrassmannPoint& P0,
                                   double step) {
  LaplacianSample s;
  s.x = x;
  const auto pg = point_geometry(G, x);
  s.slope = pg.slope;
  s.normB2 = pg.normB2;
  s.meanH = pg.meanH.norm();
  s.closed = laplacian_v_closed_form(G, x, P0);
  s.fd = laplacian_v_finite_difference(G, x, P0, step);
  const double diff = std::abs(s.fd - s.closed);
  s.rel = s.closed != 0.0 ? diff / std::abs(s.closed) : diff;
  return s;
}

Json sample_json(const LaplacianSample& s) {
  return Json{{"x", to_json(s.x)},       {"slope", s.slope},         {"normB2", s.normB2},
              {"meanH_norm", s.meanH},   {"closed_form", s.closed}, {"finite_difference", s.fd},
              {"rel_diff", s.rel}};
}

// ----------------------------------------------------------------- certify

Report run_certify(const RunConfig& c) {
  Report r;
  K0Options opts;
  opts.audit_samples = *c.samples;
  opts.seed = c.seed;
  const auto cert = compute_K0(*c.n, *c.m, *c.beta0, opts);
  const double tol = *c.tolerance;
  r.checks.push_back(check_at_least("K0 positive", cert.K0, std::numeric_limits<double>::min(),
                                    "Delta v >= K0 |B|^2 with K0 > 0 when v <= beta0 < 3"));
  r.checks.push_back(check_at_least("audit above K0", cert.worst_violation, -tol,
                                    "no sampled (lambda, h) has Delta v / |B|^2 below K0"));
  r.checks.push_back(check_at_most("block vs dense eigenvalue", cert.full_matrix_check, 1e-8,
                                   "the block decomposition reproduces the dense form spectrum"));
  r.checks.push_back(check_true("within evaluation budget", !cert.budget_exhausted, "minimization completed"));
  if (*c.beta0 == 1.0)
    r.checks.push_back(check_at_most("K0(1) = 1", std::abs(cert.K0 - 1.0), 0.0, "Delta v = |B|^2 at v = 1"));
  r.data = Json{{"n", cert.n},
                {"m", cert.m},
                {"beta0", cert.beta0},
                {"K0", cert.K0},
                {"argmin_lambda", to_json(cert.argmin_lambda.lambdas)},
                {"argmin_v", cert.argmin_lambda.v},
                {"min_eigenvalue_trace", cert.min_eigenvalue_trace},
                {"sample_count", cert.sample_count},
                {"audit_min_ratio", cert.audit_min_ratio},
                {"worst_violation", cert.worst_violation},
                {"evaluations", cert.evaluations}};
  return r;
}

// ------------------------------------------------------------------ lemmas

void lemmas_aux(const RunConfig& c, Report& r) {
  Json rows = Json::array();
  for (const auto& row : auxiliary_extrema()) {
    r.checks.push_back(check_at_most("extremum " + row.name, row.abs_diff, *c.tolerance,
                                     "numerical minimum equals the closed form"));
    r.checks.push_back(check_at_most("argmin " + row.name, std::abs(row.argmin - row.closed_argmin), 1e-6,
                                     "numerical minimizer equals the closed-form minimizer"));
    Json j{{"name", row.name},   {"computed_min", row.computed_min}, {"closed_form", row.closed_form},
           {"abs_diff", row.abs_diff}, {"argmin", row.argmin},     {"closed_argmin", row.closed_argmin}};
    rows.push_back(j);
    r.table.push_back(j);
  }
  r.data["aux"] = rows;
}

void lemmas_pair(const RunConfig& c, Report& r) {
  const auto p = lambda_pair_bound_check(3.0, *c.samples, c.seed);
  r.checks.push_back(check_at_least("pair bound", p.worst_margin, -1e-12,
                                    "lambda_a lambda_b <= v - 1 when v <= 3"));
  r.checks.push_back(check_at_most("pair bound tightness", p.tightness_gap, 1e-9,
                                   "equality at lambda_a = lambda_b = sqrt 2"));
  r.data["pair"] = Json{{"samples", p.samples},
                        {"worst_margin", p.worst_margin},
                        {"max_product", p.max_product},
                        {"polished_max_product", p.polished_max_product}};
}

void lemmas_es(const RunConfig& c, Report& r) {
  const auto s = lemma_sampling_suite(*c.samples, c.seed);
  r.checks.push_back(check_at_least("I_j estimate", s.es1_worst, -kPsdTolerance,
                                    "I_j >= 2 sum h_{a,aj}^2 when v <= 3"));
  r.checks.push_back(check_at_least("II estimate", s.es2_worst, -kPsdTolerance,
                                    "II >= (3 - v)(...) when v <= 3"));
  r.checks.push_back(check_at_least("pair bound (suite)", s.pair_worst, -kPsdTolerance,
                                    "lambda_a lambda_b <= v - 1 when v <= 3"));
  r.checks.push_back(check_at_least("III estimate", s.III_worst, -kPsdTolerance,
                                    "III >= (3 - v)(...) when v <= 3"));
  r.data["es"] = Json{{"samples", s.samples},
                      {"es1_worst", s.es1_worst},
                      {"es2_worst", s.es2_worst},
                      {"pair_worst", s.pair_worst},
                      {"III_worst", s.III_worst}};
}

void lemmas_IV(const RunConfig& c, Report& r) {
  Json rows = Json::array();
  for (int m : {2, 3, 4}) {
    const auto e = find_epsilon0(m, 3.0);
    const double worst = iv_sampling_check(m, e.eps0, *c.samples, c.seed + static_cast<std::uint64_t>(m));
    const std::string tag = "m=" + std::to_string(m);
    r.checks.push_back(check_at_least("eps0 positive " + tag, e.eps0, std::numeric_limits<double>::min(),
                                      "some eps0 > 0 keeps the IV form PSD on v <= 3"));
    r.checks.push_back(check_at_least("IV form PSD " + tag, worst, -kPsdTolerance,
                                      "IV - eps0 (...) is PSD on sampled lambda with v <= 3"));
    rows.push_back(Json{{"m", m},
                        {"eps0", e.eps0},
                        {"eps0_high", e.eps0_high},
                        {"generalized", e.generalized},
                        {"argmin_lambdas", to_json(e.argmin_lambdas)},
                        {"sampled_min_eigenvalue", worst}});
  }
  r.data["IV"] = rows;
}

void lemmas_omega(const RunConfig&, Report& r) {
  Json rows = Json::array();
  for (auto [v, C] : {std::pair{3.0, 9.0}, std::pair{2.0, 3.9}, std::pair{2.5, 4.0}, std::pair{1.2, 1.4}}) {
    const auto s = verify_omega_sup(v, C);
    if (!s.empty)
      r.checks.push_back(check_at_most("Omega supremum v=" + format_number(v) + " C=" + format_number(C), s.sup,
                                       s.bound + 1e-8, "sup over Omega of sum 1/(v - x) is at most 2/(v - 1)"));
    rows.push_back(Json{{"v", v}, {"C", C}, {"empty", s.empty}, {"sup", s.sup}, {"boundary_value", s.boundary_value},
                        {"bound", s.bound}});
  }
  r.data["omega"] = rows;
}

Report run_lemmas(const RunConfig& c) {
  Report r;
  const bool all = c.which == "all";
  if (all || c.which == "aux") lemmas_aux(c, r);
  if (all || c.which == "pair") lemmas_pair(c, r);
  if (all || c.which == "es") lemmas_es(c, r);
  if (all || c.which == "IV") lemmas_IV(c, r);
  if (all || c.which == "omega") lemmas_omega(c, r);
  if (all) r.table = Json::array();
  return r;
}

// ------------------------------------------------------------------- graph

Report run_graph(const RunConfig& c) {
  Report r;
  const GraphImmersion G = c.graph_spec.empty() ? builtin(c.example) : graph_from_json(read_file(c.graph_spec));
  if (G.m() > G.n()) throw UsageError("graph: codimension must not exceed dimension");
  const auto P0 = GrassmannPoint::canonical(G.n(), G.m());
  std::vector<Vector> points;
  if (!c.point.empty()) {
    if (static_cast<int>(c.point.size()) != G.n())
      throw UsageError("graph: --point needs " + std::to_string(G.n()) + " coordinates");
    points.push_back(Eigen::Map<const Vector>(c.point.data(), G.n()));
  } else {
    Engine rng = substream(c.seed, 0);
    const double hi = std::min(2.0, 0.9 * G.radius()), lo = std::min(0.5, 0.5 * hi);
    for (std::size_t k = 0; k < *c.samples; ++k) {
      const double radius = uniform(rng, lo, hi);
      points.push_back(radius * random_direction(rng, G.n()));
    }
  }
  double worst = 0.0, worst_H = 0.0;
  Json samples = Json::array();
  for (const auto& x : points) {
    const auto s = compare_laplacians(G, x, P0, c.fd_step);
    // Scaled by the larger of |Delta v| and v |B|^2: Delta v can vanish identically.
    const double scale = std::max(std::abs(s.closed), s.slope * s.normB2);
    const double diff = std::abs(s.fd - s.closed);
    worst = std::max(worst, scale > 0.0 ? diff / scale : diff);
    worst_H = std::max(worst_H, s.meanH);
    samples.push_back(sample_json(s));
    r.table.push_back(sample_json(s));
  }
  r.checks.push_back(check_at_most("closed form vs finite differences", worst, *c.tolerance,
                                   "the closed-form Delta v equals the Laplace-Beltrami operator of v along the Gauss map"));
  r.checks.push_back(check_at_most("minimality", worst_H, 1e-7,
                                   "the closed form presumes parallel (here zero) mean curvature"));
  r.data = Json{{"graph", G.name()}, {"n", G.n()}, {"m", G.m()}, {"fd_step", c.fd_step},
                {"max_scaled_diff", worst}, {"max_meanH", worst_H}, {"points", samples}};
  return r;
}

// ---------------------------------------------------------- cross-validate

Report run_cross_validate(const RunConfig& c) {
  Report r;
  const double tol = *c.tolerance;
  const std::size_t wanted = *c.samples;
  Engine rng = substream(c.seed, 0);
  Json data = Json::object();

  auto campaign = [&](const GraphImmersion& G, const GrassmannPoint& P0, auto draw, const std::string& label) {
    double worst = 0.0;
    Vector worst_x;
    std::size_t used = 0, skipped = 0;
    for (std::size_t tries = 0; used < wanted && tries < 20 * wanted; ++tries) {
      const Vector x = draw();
      const auto pg = point_geometry(G, x);
      const double closed = laplacian_v_closed_form(G, x, P0);
      // Below 1e-2 of v |B|^2 the relative error only measures cancellation.
      if (pg.normB2 <= 0.1 || std::abs(closed) < 1e-2 * pg.slope * pg.normB2) {
        ++skipped;
        continue;
      }
      const double fd = laplacian_v_finite_difference(G, x, P0, c.fd_step);
      const double rel = std::abs(fd - closed) / std::abs(closed);
      if (rel >= worst) worst = rel, worst_x = x;
      ++used;
    }
    r.checks.push_back(check_at_least(label + " points", static_cast<double>(used), static_cast<double>(wanted),
                                      "enough points with |B|^2 > 0.1"));
    r.checks.push_back(check_at_most(label + " relative error", worst, tol,
                                     "closed-form Delta v agrees with the divergence-form finite-difference Laplacian"));
    data[label] = Json{{"points", used}, {"skipped", skipped}, {"max_rel_error", worst}, {"worst_point", to_json(worst_x)}};
  };

  const auto hp = holomorphic_pair();
  campaign(hp, GrassmannPoint::canonical(3, 2),
           [&]() -> Vector {
             Vector x(3);
             for (int i = 0; i < 3; ++i) x(i) = 0.4 * gaussian(rng);
             return x;
           },
           "holomorphic_pair");
  const auto lo = lawson_osserman();
  campaign(lo, tilted_reference(4, 3), [&]() -> Vector {
             const double radius = uniform(rng, 0.5, 2.0);
             return radius * random_direction(rng, 4);
           },
           "lawson_osserman");

  // Convergence order from steps h and h/2 against a tilted reference plane.
  const auto P1 = tilted_reference(3, 2);
  std::vector<double> orders;
  for (int k = 0; k < 5; ++k) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = 0.3 * gaussian(rng);
    const double exact = laplacian_v_closed_form(hp, x, P1);
    const double e1 = std::abs(laplacian_v_finite_difference(hp, x, P1, c.fd_step) - exact);
    const double e2 = std::abs(laplacian_v_finite_difference(hp, x, P1, 0.5 * c.fd_step) - exact);
    orders.push_back(std::log2(e1 / e2));
  }
  std::sort(orders.begin(), orders.end());
  const double median = orders[orders.size() / 2];
  r.checks.push_back(check_at_most("Richardson order", std::abs(median - 2.0), 0.2,
                                   "the finite-difference Laplacian is second order"));
  data["richardson_orders"] = orders;
  data["fd_step"] = c.fd_step;
  r.data = data;
  return r;
}

// ------------------------------------------------------------------ shrink

Report run_shrink(const RunConfig& c) {
  Report r;
  const int n = *c.n, m = *c.m;
  const double a = *c.a, b = *c.b, beta0 = *c.beta0;
  const auto params = ShrinkParameters::make(a, b, beta0);
  const auto eps = compute_epsilon1(a, beta0, n, m);
  Engine rng = substream(c.seed, 0);
  Matrix rows(n, n + m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n + m; ++j) rows(i, j) = gaussian(rng);
  const auto P1 = GrassmannPoint::from_rows(rows);
  const auto Q = random_plane_at_level(rng, P1, b);
  const auto step = shrink_center(P1, Q, params);
  const auto cont = containment_check(P1, step.P2, params, *c.samples, c.seed + 1);

  r.checks.push_back(check_at_most("threshold identity", std::abs(params.threshold - 1.0 / std::cos(params.alpha / 2.0)),
                                   1e-12, "b < sqrt 2 (1 + 1/a)^(-1/2) exactly when beta < alpha / 2"));
  if (a == 3.0)
    r.checks.push_back(check_at_most("threshold at a = 3", std::abs(params.threshold - std::sqrt(6.0) / 2.0), 1e-12,
                                     "the case threshold equals sqrt 6 / 2"));
  r.checks.push_back(check_at_least("epsilon1 positive", eps.epsilon1, std::numeric_limits<double>::min(),
                                    "the decrement constant is positive"));
  r.checks.push_back(check_true("epsilon1 within budget", !eps.budget_exhausted, "Omega search completed"));
  if (step.kind == ShrinkCase::TrivialCenter)
    r.checks.push_back(check_at_most("trivial center", step.new_bound_on_Q, 1.0, "P2 = Q below the threshold"));
  else
    r.checks.push_back(check_at_most("decrement", step.new_bound_on_Q, b - eps.epsilon1 + 1e-12,
                                     "v(Q, P2) <= b - epsilon1"));
  r.checks.push_back(check_at_least("containment", cont.worst_margin, -kPsdTolerance,
                                    "v(P, P2) <= a whenever v(P, P1) <= b"));

  std::vector<GrassmannPoint> cloud;
  GrassmannPoint start = P1;
  double q0 = b;
  if (!c.cloud.empty()) {
    start = GrassmannPoint::canonical(n, m);
    cloud = cloud_from_json(read_file(c.cloud), start);
    q0 = 1.0;
    for (const auto& X : cloud) q0 = std::max(q0, v_value(X, start));
    if (q0 > beta0) throw UsageError("shrink: cloud exceeds beta0 relative to the coordinate plane");
  } else {
    cloud.push_back(Q);
  }
  const auto trace = iterate(cloud, start, q0, beta0, a, eps.epsilon1);
  r.checks.push_back(check_at_most("iteration count", trace.k_actual, trace.k_planned,
                                   "at most floor((3 - sqrt 6 / 2) / epsilon1) + 1 steps"));
  double worst_containment = 1.0;
  for (double v : trace.containment) worst_containment = std::max(worst_containment, v);
  r.checks.push_back(check_at_most("iteration containment", worst_containment, a + kPsdTolerance,
                                   "each new center keeps the cloud inside v <= a"));

  Json cases = Json::array();
  for (auto k : trace.cases) cases.push_back(to_string(k));
  Json centers = Json::array();
  for (const auto& P : trace.centers) centers.push_back(to_json(to_chart(P, start).Z));
  r.data = Json{
      {"parameters", {{"a", a}, {"b", b}, {"beta0", beta0}, {"alpha", params.alpha}, {"beta", params.beta},
                      {"gamma", params.gamma}, {"c", params.c}, {"threshold", params.threshold}}},
      {"epsilon1",
       {{"epsilon1", eps.epsilon1}, {"first_branch", eps.first_branch}, {"epsilon2", eps.epsilon2},
        {"omega_empty", eps.omega_empty}, {"argmin_b", eps.argmin_b}, {"argmin_thetas", to_json(eps.argmin_thetas)},
        {"evaluations", eps.evaluations}}},
      {"shrink",
       {{"case", to_string(step.kind)}, {"t0", step.t0}, {"L", step.L}, {"v_Q_P1", v_value(Q, P1)},
        {"new_bound_on_Q", step.new_bound_on_Q}, {"v_P2_P1", v_value(step.P2, P1)}, {"decrement", step.epsilon1}}},
      {"containment", {{"samples", cont.accepted}, {"proposals", cont.proposals}, {"worst_margin", cont.worst_margin}}},
      {"trace",
       {{"cloud_size", cloud.size()}, {"bounds", trace.bounds}, {"cases", cases}, {"containment", trace.containment},
        {"k_planned", trace.k_planned}, {"k_actual", trace.k_actual}, {"centers", centers}}}};
  return r;
}

// ---------------------------------------------------------------- sweep-k0

Report run_sweep(const RunConfig& c) {
  Report r;
  std::vector<double> betas(c.steps);
  for (int k = 0; k < c.steps; ++k) betas[k] = 1.0 + (*c.beta0 - 1.0) * k / (c.steps - 1);
  K0Options opts;
  opts.audit_samples = *c.samples;
  opts.seed = c.seed;
  const auto rows = sweep_K0(*c.n, *c.m, betas, opts);
  bool monotone = true, positive = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    positive = positive && rows[k].K0 > 0.0;
    if (k > 0) monotone = monotone && rows[k].K0 <= rows[k - 1].K0;
    r.table.push_back(Json{{"beta0", rows[k].beta0},
                           {"K0", rows[k].K0},
                           {"argmin_lambdas", to_json(rows[k].argmin_lambda.lambdas)},
                           {"eigen_margin", rows[k].worst_violation}});
  }
  r.checks.push_back(check_at_most("K0(1) = 1", std::abs(rows.front().K0 - 1.0), 0.0, "Delta v = |B|^2 at v = 1"));
  r.checks.push_back(check_true("K0 positive", positive, "K0(beta0) > 0 for beta0 < 3"));
  r.checks.push_back(check_true("K0 non-increasing", monotone, "K0 is a minimum over growing sets"));
  for (const auto& row : rows)
    if (row.worst_violation < -*c.tolerance) {
      r.checks.push_back(check_at_least("audit beta0=" + format_number(row.beta0), row.worst_violation, -*c.tolerance,
                                        "no sampled ratio falls below K0"));
    }
  if (betas.back() >= 2.99)
    r.checks.push_back(check_at_most("K0 near 3", rows.back().K0, 0.05, "K0 degenerates as beta0 -> 3"));
  K0Options probe_opts = opts;
  const auto probe = boundary_probe(*c.n, *c.m, probe_opts);
  r.checks.push_back(check_at_least("boundary probe lower", probe.K0, -1e-8, "the form stays PSD at beta0 = 3"));
  r.checks.push_back(check_at_most("boundary probe upper", probe.K0, 1e-3, "the form degenerates at beta0 = 3"));
  r.data = Json{{"n", *c.n}, {"m", *c.m}, {"rows", r.table}, {"boundary_probe", probe.K0},
                {"boundary_argmin", to_json(probe.argmin_lambda.lambdas)}};
  return r;
}

template <class T>
void require(bool ok, const std::string& what) {
  if (!ok) throw T(what);
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Certify: return "certify";
    case Command::Lemmas: return "lemmas";
    case Command::Graph: return "graph";
    case Command::Shrink: return "shrink";
    case Command::SweepK0: return "sweep-k0";
    case Command::CrossValidate: return "cross-validate";
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (auto c : {Command::Certify, Command::Lemmas, Command::Graph, Command::Shrink, Command::SweepK0,
                 Command::CrossValidate})
    if (to_string(c) == name) return c;
  throw UsageError("unknown command '" + name + "'");
}

RunConfig resolve(RunConfig c) {
  auto fill = [](auto& field, auto value) {
    if (!field) field = value;
  };
  switch (c.command) {
    case Command::Certify:
      fill(c.n, 4), fill(c.m, 3), fill(c.beta0, 2.9), fill(c.samples, std::size_t{100000}), fill(c.tolerance, 1e-9);
      require<UsageError>(*c.beta0 >= 1.0 && *c.beta0 < 3.0, "certify: need 1 <= beta0 < 3");
      break;
    case Command::Lemmas:
      fill(c.samples, std::size_t{100000}), fill(c.tolerance, 1e-10);
      require<UsageError>(c.which == "all" || c.which == "aux" || c.which == "pair" || c.which == "es" ||
                              c.which == "IV" || c.which == "omega",
                          "lemmas: --which must be one of aux, pair, es, IV, omega, all");
      break;
    case Command::Graph:
      if (c.example.empty() && c.graph_spec.empty()) c.example = "holomorphic_pair";
      require<UsageError>(c.example.empty() || c.graph_spec.empty(), "graph: give --example or --graph-spec, not both");
      fill(c.samples, std::size_t{20}), fill(c.tolerance, 1e-3);
      require<UsageError>(c.fd_step > 0.0 && c.fd_step < 0.1, "graph: need 0 < fd-step < 0.1");
      break;
    case Command::Shrink:
      fill(c.n, 2), fill(c.m, 2), fill(c.a, 3.0), fill(c.b, 2.8), fill(c.beta0, std::max(2.9, *c.b)),
          fill(c.samples, std::size_t{10000}), fill(c.tolerance, 1e-9);
      require<UsageError>(*c.a > 1.0, "shrink: need a > 1");
      require<UsageError>(*c.b >= 1.0 && *c.b <= *c.beta0 && *c.beta0 < *c.a, "shrink: need 1 <= b <= beta0 < a");
      break;
    case Command::SweepK0:
      fill(c.n, 4), fill(c.m, 3), fill(c.beta0, 2.99), fill(c.samples, std::size_t{20000}), fill(c.tolerance, 1e-9);
      require<UsageError>(*c.beta0 > 1.0 && *c.beta0 < 3.0, "sweep-k0: need 1 < beta0 < 3");
      require<UsageError>(c.steps >= 2 && c.steps <= 200, "sweep-k0: need 2 <= steps <= 200");
      break;
    case Command::CrossValidate:
      fill(c.samples, std::size_t{50}), fill(c.tolerance, 1e-3);
      require<UsageError>(c.fd_step > 0.0 && c.fd_step < 0.1, "cross-validate: need 0 < fd-step < 0.1");
      break;
  }
  if (c.n || c.m) {
    fill(c.n, 4), fill(c.m, 3);
    require<UsageError>(*c.n >= 1 && *c.m >= 1 && *c.m <= *c.n && *c.n <= 8, "need 1 <= m <= n <= 8");
  }
  require<UsageError>(!c.samples || *c.samples >= 1, "need samples >= 1");
  require<UsageError>(!c.tolerance || *c.tolerance >= 0.0, "need tolerance >= 0");
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["command"] = to_string(c.command);
  auto put = [&](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  put("n", c.n);
  put("m", c.m);
  put("beta0", c.beta0);
  put("a", c.a);
  put("b", c.b);
  put("samples", c.samples);
  put("tolerance", c.tolerance);
  j["seed"] = c.seed;
  j["fd_step"] = c.fd_step;
  if (!c.example.empty()) j["example"] = c.example;
  if (!c.point.empty()) j["point"] = c.point;
  if (!c.graph_spec.empty()) j["graph_spec"] = c.graph_spec;
  if (c.command == Command::Lemmas) j["which"] = c.which;
  if (!c.cloud.empty()) j["cloud"] = c.cloud;
  if (c.command == Command::SweepK0) j["steps"] = c.steps;
  j["format"] = c.format == OutputFormat::Json ? "json" : "csv";
  return j;
}

Report run(const RunConfig& config) {
  const RunConfig c = resolve(config);
  Report r;
  switch (c.command) {
    case Command::Certify: r = run_certify(c); break;
    case Command::Lemmas: r = run_lemmas(c); break;
    case Command::Graph: r = run_graph(c); break;
    case Command::Shrink: r = run_shrink(c); break;
    case Command::SweepK0: r = run_sweep(c); break;
    case Command::CrossValidate: r = run_cross_validate(c); break;
  }
  r.command = to_string(c.command);
  r.config = config_to_json(c);
  return r;
}

}  // namespace gbl
