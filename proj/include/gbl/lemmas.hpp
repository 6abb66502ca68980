#pragma once

// Numerical verification of the positivity lemmas behind the lower bound for
// Delta v: the lambda-pair product bound, the III and IV forms, the
// supremum claim on the set Omega, and the scalar extrema used in the proofs.

#include <cstdint>
#include <string>
#include <vector>

#include "gbl/certifier.hpp"

namespace gbl {

struct PairBoundResult {
  double v_bound = 1.0;
  std::size_t samples = 0;
  double worst_margin = 0.0;          // min over samples of v - 1 - lambda_a lambda_b
  double max_product = 0.0;           // largest sampled lambda_a lambda_b
  double polished_max_product = 0.0;  // constrained maximum from a 1-D polish
  double tightness_gap = 0.0;         // |product at lambda_a = lambda_b = sqrt(v_bound - 1) - (v_bound - 1)|
};

// Samples pairs with (1 + lambda_a^2)(1 + lambda_b^2) <= v_bound^2.
PairBoundResult lambda_pair_bound_check(double v_bound, std::size_t samples, std::uint64_t seed = 1);

// 3 x 3 matrix of III - (3 - v)(...) in (h_{a,bc}, h_{b,ca}, h_{c,ab}).
Matrix lemma_III_matrix(const Vector& triple, double v);
// Smallest eigenvalue of lemma_III_matrix. Throws PreconditionViolated
// unless prod (1 + lambda^2) <= v^2 <= 9.
double verify_III(const Vector& triple, double v);

struct OmegaSupResult {
  bool empty = false;         // no point has z > v
  double sup = 0.0;           // numerical supremum of f over Omega
  double boundary_value = 0.0;  // f(1, 1, C), the value the boundary reduction predicts
  double bound = 0.0;         // 2 / (v - 1)
  double x = 1.0, y = 1.0, z = 1.0;
};

// f = 1/(v-x) + 1/(v-y) + 1/(v-z) over {1 <= x, y < v, z > v, xyz = C}.
// Requires v > 1 and 1 <= C <= v^2.
OmegaSupResult verify_omega_sup(double v, double C);

// (2m-1) x (2m-1) matrix of IV_alpha - eps0 (...) in the variables
// h_{a,aa}, then h_{a,bb} and h_{b,ba} for b != a in increasing order.
Matrix lemma_IV_matrix(const LambdaProfile& lambda, int alpha, double eps0);
// Smallest eigenvalue of lemma_IV_matrix for one alpha, or over all alpha.
// Requires prod (1 + lambda^2) <= 9 and 0 <= eps0 < 1.
double verify_IV(const LambdaProfile& lambda, double eps0, int alpha);
double verify_IV(const LambdaProfile& lambda, double eps0);

struct Epsilon0Result {
  int m = 0;
  double v_bound = 3.0;
  double eps0 = 0.0;       // feasible end of the final bracket
  double eps0_high = 1.0;  // infeasible end
  double generalized = 0.0;  // min over lambda of lambda_min(D^-1/2 IV D^-1/2)
  Vector argmin_lambdas;
  int bisection_steps = 0;
};

// Largest eps0 for which the IV form stays PSD on prod (1 + lambda^2) <= v_bound^2,
// by bisection on eps0 with a grid-plus-polish minimization over lambda inside.
Epsilon0Result find_epsilon0(int m, double v_bound = 3.0, int grid_points = 17);

// Minimum over sampled admissible lambda (and every alpha) of verify_IV.
double iv_sampling_check(int m, double eps0, std::size_t samples, std::uint64_t seed,
                         double v_bound = 3.0);

struct ExtremumRow {
  std::string name;
  double computed_min = 0.0;
  double closed_form = 0.0;
  double abs_diff = 0.0;
  double argmin = 0.0;
  double closed_argmin = 0.0;
};

// Scalar extrema at C = 1:
//   (x+1)(x+2C^2-C)^2/(x-C)^2 on x > C        -> (2C+1)^3/(C+1) = 27/2
//   (x+1)(x+2C(C-1))/(x-2C) on x > 2C         -> 5 + 2 sqrt 6
//   t^3 - 10 t^2 + 27 t - 9 on t > (3+sqrt5)/2 -> (187 - 38 sqrt 19)/27
std::vector<ExtremumRow> auxiliary_extrema();

struct LemmaSuiteResult {
  std::size_t samples = 0;
  double es1_worst = 0.0;   // I_j - 2 sum h_{a,aj}^2
  double es2_worst = 0.0;   // II - (3 - v)(...), smallest eigenvalue
  double pair_worst = 0.0;  // v - 1 - lambda_a lambda_b
  double III_worst = 0.0;   // verify_III
};

// Admissible random samples with v <= v_bound for all four checks.
LemmaSuiteResult lemma_sampling_suite(std::size_t samples, std::uint64_t seed, double v_bound = 3.0);

}  // namespace gbl
