#pragma once

#include <Eigen/Dense>
#include <functional>

namespace gbl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct MinimizeResult {
  Vector x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Derivative-free simplex minimization (GSL nmsimplex2). The objective may
// return +inf to mark infeasible points.
MinimizeResult nelder_mead(const std::function<double(const Vector&)>& objective,
                           const Vector& start, double initial_step, int max_iterations,
                           double size_tolerance = 1e-12);

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
};

// Brent minimization of a unimodal function on [lo, hi].
ScalarMinimum brent_minimize(const std::function<double(double)>& f, double lo, double hi);

// Root of f on [lo, hi] given f(lo), f(hi) of opposite sign. Bisection until
// the bracket is narrower than `tolerance`. Throws RootBracketFailure when
// the endpoints do not bracket a sign change.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tolerance = 1e-12);

}  // namespace gbl
