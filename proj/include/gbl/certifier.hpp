#pragma once

// Laplacian of the v-function on a submanifold with parallel mean curvature,
// written as a quadratic form in the second fundamental form, and the
// constrained minimization that yields the subharmonicity constant K0.
//
// Index conventions: alpha in [0, m) are normal indices, i, j in [0, n) are
// tangent indices, and the first m tangent directions are paired with the
// normals through the singular values lambda_alpha (requires m <= n).

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gbl/errors.hpp"
#include "gbl/rng.hpp"

namespace gbl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Absolute slack for every positive-semidefiniteness assertion.
inline constexpr double kPsdTolerance = 1e-9;

// Second fundamental form coefficients h_{alpha,ij}, symmetric in (i, j).
// Only the upper triangle is stored, so symmetry holds exactly.
class HTensor {
 public:
  HTensor() = default;
  HTensor(int n, int m);

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }

  double operator()(int alpha, int i, int j) const { return data_[offset(alpha, i, j)]; }
  void set(int alpha, int i, int j, double value) { data_[offset(alpha, i, j)] = value; }

  // Sum over alpha and all ordered (i, j) of h^2, i.e. |B|^2.
  double norm2() const;

  // Flattened coordinates of length m n (n+1) / 2: for each alpha the pairs
  // i <= j in row-major order, off-diagonal entries scaled by sqrt(2) so the
  // Euclidean norm of the vector equals |B|.
  Vector flatten() const;
  static HTensor unflatten(int n, int m, const Vector& y);
  static std::size_t flat_size(int n, int m) { return static_cast<std::size_t>(m) * n * (n + 1) / 2; }
  static int flat_index(int n, int alpha, int i, int j);

  static HTensor random(Engine& rng, int n, int m);

 private:
  std::size_t offset(int alpha, int i, int j) const;
  int n_ = 0;
  int m_ = 0;
  std::vector<double> data_;
};

// The m paired singular values; the other n - m are zero.
struct LambdaProfile {
  int n = 0;
  int m = 0;
  Vector lambdas;
  double v = 1.0;

  // Throws PreconditionViolated for negative or non-finite entries and
  // DimensionMismatch when m > n.
  static LambdaProfile make(int n, const Vector& lambdas);
};

double v_of_lambdas(const Vector& lambdas);

struct PairTerm {
  int j, alpha, beta;
  double value;
};
struct TripleTerm {
  int alpha, beta, gamma;
  double value;
};

// The grouping of v^{-1} Delta v by index type.
struct TermDecomposition {
  double pure_high = 0.0;               // sum over alpha, i, j >= m of h^2
  std::vector<double> I_terms;          // one per j >= m
  std::vector<PairTerm> II_terms;       // j >= m, alpha < beta
  std::vector<TripleTerm> III_terms;    // alpha < beta < gamma
  std::vector<double> IV_terms;         // one per alpha

  double total() const;
};

// Delta v = v [ |h|^2 + sum 2 lambda_a^2 h_{a,aj}^2
//               + sum_{a != b, j} lambda_a lambda_b (h_{a,aj} h_{b,bj} + h_{a,bj} h_{b,aj}) ].
double laplacian_v(const LambdaProfile& lambda, const HTensor& h);

// Symmetric matrix M with y^T M y = Delta v for y = h.flatten().
Matrix quadratic_form_matrix(const LambdaProfile& lambda);

TermDecomposition decompose_terms(const LambdaProfile& lambda, const HTensor& h);

// Smallest eigenvalue of quadratic_form_matrix, computed block by block: the
// form splits into independent pure-high, I_j, II, III and IV_alpha blocks.
double min_form_eigenvalue(const LambdaProfile& lambda);

// Small blocks of the form, in flattened coordinates and including the
// factor v. Exposed for tests.
Matrix form_block_I(const LambdaProfile& lambda);
Matrix form_block_II(const LambdaProfile& lambda, int alpha, int beta);
Matrix form_block_III(const LambdaProfile& lambda, int alpha, int beta, int gamma);
Matrix form_block_IV(const LambdaProfile& lambda, int alpha);

// Random m-vector with prod (1 + lambda^2) <= v_bound^2. Mixes interior
// points with points pushed radially onto the constraint boundary.
Vector sample_admissible_lambdas(Engine& rng, int m, double v_bound);

// Scales lambdas radially so that prod (1 + lambda^2) = v_bound^2 when they
// are outside the admissible set; admissible input is returned unchanged.
Vector project_admissible(const Vector& lambdas, double v_bound);

struct K0Options {
  int grid_points = 17;          // per lambda axis on [0, sqrt(beta0^2 - 1)]
  int polish_starts = 4;         // best grid points refined by Nelder-Mead
  int polish_iterations = 4000;
  std::size_t audit_samples = 1'000'000;
  std::uint64_t seed = 42;
  long max_evaluations = 50'000'000;  // objective evaluations before giving up
  std::vector<Vector> extra_starts;   // warm starts, projected if needed
};

struct CertificateReport {
  int n = 0;
  int m = 0;
  double beta0 = 1.0;
  double K0 = 1.0;
  LambdaProfile argmin_lambda;
  std::vector<double> min_eigenvalue_trace;  // best value after each stage
  std::size_t sample_count = 0;
  double audit_min_ratio = 0.0;   // smallest sampled Delta v / |B|^2
  double worst_violation = 0.0;   // min over samples of ratio - K0, >= 0 when K0 is honest
  double full_matrix_check = 0.0; // |block min - dense eigen-solver min| at the argmin
  long evaluations = 0;
  bool budget_exhausted = false;
};

// Minimizes min_form_eigenvalue over { lambda >= 0 : prod (1 + lambda^2) <= beta0^2 }.
// Requires 1 <= beta0 < 3 and 1 <= m <= n.
CertificateReport compute_K0(int n, int m, double beta0, const K0Options& options = {});

// Same minimization at beta0 = 3, where the form degenerates.
CertificateReport boundary_probe(int n, int m, const K0Options& options = {});

// compute_K0 over increasing beta0 values, warm-starting each point from the
// previous minimizers so the K0 column cannot increase.
std::vector<CertificateReport> sweep_K0(int n, int m, const std::vector<double>& betas,
                                        const K0Options& options = {});

}  // namespace gbl
