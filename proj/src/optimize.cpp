#include "gbl/optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>

#include "gbl/errors.hpp"

namespace gbl {

namespace {

constexpr double kInfeasible = 1e300;

struct Objective {
  const std::function<double(const Vector&)>* f;
  Eigen::Index dim;
};

double gsl_trampoline(const gsl_vector* x, void* params) {
  const auto* obj = static_cast<const Objective*>(params);
  Vector v(obj->dim);
  for (Eigen::Index i = 0; i < obj->dim; ++i) v[i] = gsl_vector_get(x, static_cast<size_t>(i));
  const double value = (*obj->f)(v);
  return std::isfinite(value) ? value : kInfeasible;
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* s) const { gsl_multimin_fminimizer_free(s); }
};

}  // namespace

MinimizeResult nelder_mead(const std::function<double(const Vector&)>& objective,
                           const Vector& start, double initial_step, int max_iterations,
                           double size_tolerance) {
  gsl_set_error_handler_off();
  const auto dim = start.size();
  MinimizeResult result;
  result.x = start;
  result.value = objective(start);
  result.evaluations = 1;
  if (dim == 0) {
    result.converged = true;
    return result;
  }

  Objective obj{&objective, dim};
  gsl_multimin_function fn;
  fn.n = static_cast<size_t>(dim);
  fn.f = &gsl_trampoline;
  fn.params = &obj;

  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(fn.n));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(fn.n));
  for (size_t i = 0; i < fn.n; ++i) gsl_vector_set(x.get(), i, start[static_cast<Eigen::Index>(i)]);
  gsl_vector_set_all(step.get(), initial_step);

  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, fn.n));
  if (gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), step.get()) != GSL_SUCCESS) return result;

  int iter = 0;
  int status = GSL_CONTINUE;
  while (status == GSL_CONTINUE && iter < max_iterations) {
    ++iter;
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), size_tolerance);
  }

  const double best = gsl_multimin_fminimizer_minimum(s.get());
  if (best < result.value) {
    for (Eigen::Index i = 0; i < dim; ++i)
      result.x[i] = gsl_vector_get(s->x, static_cast<size_t>(i));
    result.value = objective(result.x);
  }
  result.evaluations += iter * static_cast<int>(dim + 1);
  result.converged = status == GSL_SUCCESS;
  return result;
}

ScalarMinimum brent_minimize(const std::function<double(double)>& f, double lo, double hi) {
  std::uintmax_t max_iter = 500;
  const auto [x, fx] = boost::math::tools::brent_find_minima(
      f, lo, hi, std::numeric_limits<double>::digits, max_iter);
  return {x, fx};
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tolerance) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (!(std::signbit(f_lo) != std::signbit(f_hi)))
    throw RootBracketFailure("bisection endpoints do not bracket a sign change");
  auto done = [tolerance](double a, double b) { return std::abs(b - a) <= tolerance; };
  std::uintmax_t max_iter = 400;
  const auto bracket = boost::math::tools::bisect(f, lo, hi, done, max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace gbl
