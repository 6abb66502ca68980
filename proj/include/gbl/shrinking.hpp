#pragma once

// Replacement of a reference plane P1 by a nearer center P2 so that the
// v-bound on a given plane Q drops while the b-sublevel set of P1 stays
// inside the a-sublevel set of P2, and the iteration of that step.

#include <cstdint>
#include <string>
#include <vector>

#include "gbl/grassmann.hpp"
#include "gbl/rng.hpp"

namespace gbl {

struct ShrinkParameters {
  double a = 3.0;      // outer bound, > 1
  double b = 1.0;      // current bound, in [1, a)
  double beta0 = 1.0;  // global slope bound, b <= beta0 < a
  double alpha = 0.0;  // arccos(1/a)
  double beta = 0.0;   // arccos(1/b)
  double gamma = 0.0;  // alpha - beta
  double c = 1.0;      // sec(gamma)
  double threshold = 1.0;  // sqrt(2) (1 + 1/a)^(-1/2)

  // Throws PreconditionViolated unless a > 1 and 1 <= b <= beta0 < a.
  static ShrinkParameters make(double a, double b, double beta0);
};

double shrink_threshold(double a);

enum class ShrinkCase { TrivialCenter, CaseI, CaseII };
std::string to_string(ShrinkCase c);

struct ShrinkResult {
  GrassmannPoint P2 = GrassmannPoint::canonical(1, 1);
  ShrinkCase kind = ShrinkCase::TrivialCenter;
  double t0 = 0.0;              // geodesic parameter, Case II only
  double L = 0.0;               // distance from Q to P1, Case II only
  double new_bound_on_Q = 1.0;  // v(Q, P2)
  double epsilon1 = 0.0;        // realized decrement b - v(Q, P2)
};

// Requires v(Q, P1) <= b (relative slack 1e-12).
ShrinkResult shrink_center(const GrassmannPoint& P1, const GrassmannPoint& Q, const ShrinkParameters& params);

// prod sec(theta_a s / L), the v-value at arc length s from the start of a
// geodesic whose Jordan angles to its endpoint are `thetas`, L = |thetas|.
double sec_product(const Vector& thetas, double s);

struct ContainmentResult {
  double worst_margin = 0.0;  // min of a - v(P, P2)
  std::size_t accepted = 0;   // sampled P with v(P, P1) <= b
  std::size_t proposals = 0;
};

// Rejection-samples P uniformly in the chart of P1 over the Frobenius ball
// that contains {v(., P1) <= b}; each accepted P is tested together with its
// radial push to the boundary v = b.
ContainmentResult containment_check(const GrassmannPoint& P1, const GrassmannPoint& P2,
                                    const ShrinkParameters& params, std::size_t samples, std::uint64_t seed);

struct Epsilon1Options {
  int b_points = 17;             // grid along b in [threshold, beta0]
  int theta_points = 0;          // per theta axis; 0 selects 64 (p <= 3) or 32 (p >= 4)
  int polish_starts = 4;
  int polish_iterations = 3000;
  std::size_t max_evaluations = 5'000'000;
};

struct Epsilon1Result {
  double a = 3.0, beta0 = 1.0;
  int angles = 1;               // min(n, m)
  double first_branch = 0.0;    // threshold - 1
  double epsilon2 = 0.0;        // inf of F over Omega, +inf if Omega is empty
  double epsilon1 = 0.0;        // min of the two
  bool omega_empty = false;
  double argmin_b = 0.0;
  Vector argmin_thetas;
  std::size_t evaluations = 0;
  bool budget_exhausted = false;  // best value found before the budget ran out
};

// F(b, theta) = b - prod sec(theta t0 / L) where prod sec(theta (L - t0) / L) = c(b).
// Returns +inf outside Omega.
double epsilon2_objective(double a, double b, const Vector& thetas);

// Requires 1 <= beta0 < a.
Epsilon1Result compute_epsilon1(double a, double beta0, int n, int m, const Epsilon1Options& options = {});

struct IterationTrace {
  std::vector<GrassmannPoint> centers;  // P_0, P_1, ...
  std::vector<double> bounds;           // certified max of v(., P_j) over the cloud
  std::vector<ShrinkCase> cases;        // case used for step j -> j + 1
  std::vector<double> containment;      // max of v(., P_{j+1}) over the cloud, <= a
  double epsilon1 = 0.0;
  double threshold = 1.0;
  int k_planned = 0;                    // floor((a - threshold) / epsilon1) + 1
  int k_actual = 0;
};

// Repeats shrink_center with Q the T-mean of the cloud relative to the
// current center, until the certified bound drops below the threshold.
// Requires 1 <= q0_bound <= beta0 < a and every cloud point within q0_bound
// of `start`. `epsilon1 <= 0` computes it with compute_epsilon1. Throws
// Stalled when a step decrements the bound by less than epsilon1 / 2.
IterationTrace iterate(const std::vector<GrassmannPoint>& cloud, const GrassmannPoint& start, double q0_bound,
                       double beta0, double a = 3.0, double epsilon1 = 0.0);

// Plane with v(Q, P1) = level along a random chart direction.
GrassmannPoint random_plane_at_level(Engine& rng, const GrassmannPoint& P1, double level);

// `count` planes from_chart(Z, center) with Z uniform in [-spread, spread].
std::vector<GrassmannPoint> synthetic_cloud(Engine& rng, const GrassmannPoint& center, double spread,
                                            std::size_t count);

// Cloud from a JSON array of n x m chart matrices around P0.
std::vector<GrassmannPoint> cloud_from_json(const std::string& text, const GrassmannPoint& P0);

}  // namespace gbl
