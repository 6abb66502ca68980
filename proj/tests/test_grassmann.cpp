#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gbl/grassmann.hpp"
#include "test_support.hpp"

using namespace gbl;
using namespace gbl::testing;

namespace {

Vector flatten(const Matrix& X) {
  Vector x(X.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index a = 0; a < X.cols(); ++a) x(i * X.cols() + a) = X(i, a);
  return x;
}

}  // namespace

TEST_CASE("make_point orthonormalizes and keeps the row space") {
  Matrix id = Matrix::Zero(3, 5);
  id.leftCols(3).setIdentity();
  const auto P = make_point(id);
  CHECK(max_abs(P.frame() - id) < 1e-15);

  Engine rng = substream(1, 0);
  const Matrix rows = random_matrix(rng, 3, 5);
  const auto A = make_point(rows);
  const auto B = make_point(2.0 * rows);
  CHECK(max_abs(A.frame() * A.frame().transpose() - Matrix::Identity(3, 3)) < 1e-12);
  CHECK(max_abs(A.frame() - B.frame()) < 1e-12);
  // Same oriented plane as the input rows.
  CHECK((rows * A.frame().transpose()).determinant() > 0);
  CHECK(max_abs(A.projector() * rows.transpose() - rows.transpose()) < 1e-12);

  Matrix dup = rows;
  dup.row(2) = dup.row(0);
  CHECK_THROWS_AS(make_point(dup), RankDeficient);
  CHECK_THROWS_AS(make_point(Matrix::Identity(3, 3)), DimensionMismatch);
}

TEST_CASE("orthonormal complement of the canonical plane is (0 | I)") {
  const auto P0 = GrassmannPoint::canonical(3, 2);
  const Matrix C = orthonormal_complement(P0);
  Matrix expected = Matrix::Zero(2, 5);
  expected.rightCols(2).setIdentity();
  CHECK(max_abs(C - expected) < 1e-15);

  Engine rng = substream(1, 1);
  const auto P = random_point(rng, 3, 2);
  const Matrix D = orthonormal_complement(P);
  Matrix full(5, 5);
  full << P.frame(), D;
  CHECK(max_abs(full * full.transpose() - Matrix::Identity(5, 5)) < 1e-12);
  CHECK(full.determinant() > 0);
}

TEST_CASE("w pairing") {
  Engine rng = substream(2, 0);
  const auto P = random_point(rng, 3, 2);
  const auto Q = random_point(rng, 3, 2);
  CHECK(w_pairing(P, P) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w_pairing(P, Q) == doctest::Approx(w_pairing(Q, P)).epsilon(1e-13));
  CHECK(std::abs(w_pairing(P, Q)) <= 1.0 + 1e-14);

  // x-y plane against the plane rotated by theta in the (x, z) plane: the
  // frame product is [[cos theta, 0], [0, 1]], whose determinant is cos theta.
  const double theta = 0.7;
  const auto xy = GrassmannPoint::canonical(2, 1);
  const auto rotated = single_rotation(2, 1, theta);
  CHECK(w_pairing(xy, rotated) == doctest::Approx(std::cos(theta)).epsilon(1e-14));

  CHECK_THROWS_AS(w_pairing(P, GrassmannPoint::canonical(2, 3)), DimensionMismatch);
}

TEST_CASE("Jordan decomposition") {
  Engine rng = substream(3, 0);
  const auto P = random_point(rng, 4, 3);
  const auto same = jordan_decompose(P, P);
  CHECK(same.thetas.maxCoeff() < 1e-7);

  const auto J0 = jordan_decompose(GrassmannPoint::canonical(3, 2), single_rotation(3, 2, 0.4));
  REQUIRE(J0.thetas.size() == 2);
  CHECK(J0.thetas(0) == doctest::Approx(0.4).epsilon(1e-13));
  CHECK(J0.thetas(1) < 1e-12);

  for (int trial = 0; trial < 50; ++trial) {
    const auto A = random_point(rng, 4, 3);
    const auto B = random_point(rng, 4, 3);
    const auto J = jordan_decompose(A, B);
    const double det = w_pairing(A, B);
    CHECK(std::abs(std::abs(det) - J.mus.prod()) < 1e-10);
    CHECK((det >= 0 ? 1 : -1) == J.orientation_sign);
    for (Eigen::Index k = 0; k < J.thetas.size(); ++k) {
      CHECK(J.thetas(k) >= 0.0);
      CHECK(J.thetas(k) <= std::numbers::pi / 2);
      if (k > 0) CHECK(J.thetas(k) <= J.thetas(k - 1));
      CHECK(std::abs(J.mus(k) - std::cos(J.thetas(k))) < 1e-12);
      CHECK(std::abs(J.lambdas(k) - std::tan(J.thetas(k))) <= 1e-12 * std::max(1.0, J.lambdas(k)));
    }
    // Principal bases are orthonormal and pair diagonally.
    const Matrix cross = J.left_basis * J.right_basis.transpose();
    CHECK(max_abs(cross - Matrix(cross.diagonal().asDiagonal())) < 1e-10);
  }

  const auto orth = jordan_decompose(GrassmannPoint::canonical(1, 1), single_rotation(1, 1, std::numbers::pi / 2));
  CHECK(std::isinf(orth.lambdas(0)));
}

TEST_CASE("distance and triangle inequality") {
  Engine rng = substream(4, 0);
  const auto P = random_point(rng, 3, 2);
  CHECK(distance(P, P) < 1e-7);
  CHECK(distance(GrassmannPoint::canonical(3, 2), single_rotation(3, 2, 0.9)) ==
        doctest::Approx(0.9).epsilon(1e-13));

  double worst = 1e300;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto A = random_point(rng, 3, 2);
    const auto B = random_point(rng, 3, 2);
    const auto C = random_point(rng, 3, 2);
    worst = std::min(worst, distance(A, B) + distance(B, C) - distance(A, C));
    if (trial < 100) CHECK(distance(A, B) == doctest::Approx(distance(B, A)).epsilon(1e-10));
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("v function") {
  const auto P0 = GrassmannPoint::canonical(3, 2);
  CHECK(v_value(P0, P0) == doctest::Approx(1.0).epsilon(1e-15));
  // lambda = (1, 1): theta = pi/4 twice, v = sqrt(2) * sqrt(2).
  const auto P = plane_with_angles(3, 2, Vector::Constant(2, std::numbers::pi / 4));
  CHECK(v_value(P, P0) == doctest::Approx(2.0).epsilon(1e-13));

  Engine rng = substream(5, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto Q = random_chart_point(rng, P0, 2.0);
    worst = std::max(worst, std::abs(v_value(Q, P0) * w_pairing(Q, P0) - 1.0));
    const auto J = jordan_decompose(Q, P0);
    double prod = 1.0;
    for (Eigen::Index k = 0; k < J.lambdas.size(); ++k) prod *= std::sqrt(1.0 + J.lambdas(k) * J.lambdas(k));
    if (trial < 500) CHECK(prod == doctest::Approx(v_value(Q, P0)).epsilon(1e-10));
  }
  CHECK(worst < 1e-10);

  CHECK_THROWS_AS(v_value(plane_with_angles(3, 2, Vector::Constant(1, std::numbers::pi / 2)), P0), OutOfChart);
}

TEST_CASE("chart round trip") {
  Engine rng = substream(6, 0);
  const auto base = random_point(rng, 3, 2);
  const auto canonical = GrassmannPoint::canonical(3, 2);
  CHECK(max_abs(from_chart({Matrix::Zero(3, 2)}, base).frame() - base.frame()) < 1e-12);

  for (int trial = 0; trial < 200; ++trial) {
    Matrix Z(3, 2);
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 2; ++a) Z(i, a) = uniform(rng, -2.0, 2.0);
    for (const auto* P0 : {&base, &canonical}) {
      const auto P = from_chart({Z}, *P0);
      CHECK(max_abs(to_chart(P, *P0).Z - Z) < 1e-9);
      CHECK(v_value(P, *P0) == doctest::Approx(v_of_chart(Z)).epsilon(1e-10));
    }
    // Singular values of Z are tan of the Jordan angles.
    const auto J = jordan_decompose(from_chart({Z}, base), base);
    Eigen::JacobiSVD<Matrix> svd(Z);
    for (int k = 0; k < 2; ++k)
      CHECK(std::abs(svd.singularValues()(k) - J.lambdas(k)) < 1e-10 * std::max(1.0, J.lambdas(k)));
  }
  CHECK_THROWS_AS(to_chart(plane_with_angles(3, 2, Vector::Constant(1, std::numbers::pi / 2)), canonical),
                  OutOfChart);
}

TEST_CASE("geodesic interpolates Jordan angles") {
  const auto P0 = GrassmannPoint::canonical(3, 2);
  const auto P1 = single_rotation(3, 2, 0.8);
  CHECK(max_abs(geodesic(P0, P1, 0.0).frame() - P0.frame()) < 1e-12);
  CHECK(max_abs(geodesic(P0, P1, 0.8).projector() - P1.projector()) < 1e-12);
  const auto mid = geodesic(P0, P1, 0.4);
  CHECK(distance(P0, mid) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(distance(mid, P1) == doctest::Approx(0.4).epsilon(1e-12));

  Engine rng = substream(7, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto Q = random_chart_point(rng, P0, 1.0);
    const auto P = random_chart_point(rng, P0, 1.0);
    const auto J = jordan_decompose(Q, P);
    if (J.orientation_sign < 0 || J.thetas.maxCoeff() > 1.5) continue;
    const double L = J.thetas.norm();
    const double t = uniform(rng, 0.0, L);
    const auto g = geodesic(Q, P, t);
    worst = std::max(worst, std::abs(distance(Q, g) - t));
    worst = std::max(worst, std::abs(distance(g, P) - (L - t)));
    double expected_v = 1.0;
    for (Eigen::Index k = 0; k < J.thetas.size(); ++k) expected_v /= std::cos(J.thetas(k) * t / L);
    CHECK(v_value(g, Q) == doctest::Approx(expected_v).epsilon(1e-9));
    if (trial < 50) {
      const auto end = geodesic(Q, P, L);
      CHECK(max_abs(end.projector() - P.projector()) < 1e-9);
      CHECK(w_pairing(end, P) > 0.0);
    }
  }
  CHECK(worst < 1e-9);

  const auto far = plane_with_angles(3, 2, Vector::Constant(1, std::numbers::pi / 2 - 1e-10));
  CHECK_THROWS_AS(geodesic(P0, far, 0.1), CutLocus);
  CHECK_THROWS_AS(geodesic(P0, P1, 0.9), PreconditionViolated);
}

TEST_CASE("Hessian of v at the base point is the identity") {
  const auto P0 = GrassmannPoint::canonical(4, 2);
  const auto H = hessian_v(P0, P0);
  CHECK(max_abs(H.hessian - Matrix::Identity(8, 8)) < 1e-12);
  CHECK_THROWS_AS(hessian_v_matrix(2, Vector::Zero(3)), DimensionMismatch);
}

TEST_CASE("Hessian of v matches geodesic second differences") {
  Engine rng = substream(8, 0);
  for (auto [n, m] : {std::pair{3, 2}, std::pair{4, 3}, std::pair{2, 2}}) {
    const auto P0 = random_point(rng, n, m);
    for (int trial = 0; trial < 20; ++trial) {
      GrassmannPoint P = random_chart_point(rng, P0, 1.0);
      const auto H = hessian_v(P, P0);
      if (H.frame.thetas.maxCoeff() > 1.2) continue;
      Matrix X = random_matrix(rng, n, m);
      X /= X.norm();
      const Vector x = flatten(X);
      const double quad = x.dot(H.hessian * x);
      const double h = 1e-3;
      const double f0 = v_value(exp_map(H.frame, X, 0.0), P0);
      const double fp = v_value(exp_map(H.frame, X, h), P0);
      const double fm = v_value(exp_map(H.frame, X, -h), P0);
      const double second = (fp - 2.0 * f0 + fm) / (h * h);
      CHECK(f0 == doctest::Approx(H.frame.v).epsilon(1e-12));
      CHECK(std::abs(second - quad) / std::abs(quad) < 1e-5);
    }
  }
}

TEST_CASE("exp_map moves at unit speed") {
  Engine rng = substream(9, 0);
  const auto P0 = random_point(rng, 3, 2);
  const auto P = random_chart_point(rng, P0, 0.8);
  const auto F = adapted_frame(P, P0);
  Matrix X = random_matrix(rng, 3, 2);
  X /= X.norm();
  // Short geodesics from P realize the distance.
  CHECK(distance(P, exp_map(F, X, 0.3)) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(max_abs(exp_map(F, X, 0.0).frame() - P.frame()) < 1e-12);
}

TEST_CASE("B_JX predicate and convexity bound") {
  const auto P0 = GrassmannPoint::canonical(3, 2);
  CHECK(in_bjx(P0, P0));
  Vector third(2);
  third << std::numbers::pi / 3, std::numbers::pi / 3;
  CHECK_FALSE(in_bjx(plane_with_angles(3, 2, third), P0));
  CHECK(in_bjx(single_rotation(2, 1, 1.5), GrassmannPoint::canonical(2, 1)));

  Engine rng = substream(10, 0);
  int checked = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const auto P = random_chart_point(rng, P0, 1.0);
    if (v_value(P, P0) < 2.0) {
      ++checked;
      if (!in_bjx(P, P0)) FAIL("v < 2 outside B_JX");
    }
  }
  CHECK(checked > 1000);

  for (double beta0 : {0.5, 1.0, 1.4}) {
    for (int trial = 0; trial < 200; ++trial) {
      Vector th(3);
      for (int k = 0; k < 3; ++k) th(k) = uniform(rng, 0.0, beta0);
      std::sort(th.data(), th.data() + 3, std::greater<>());
      if (th(0) + th(1) > beta0) continue;
      Vector lam = th.array().tan();
      const Matrix H = hessian_v_matrix(4, lam);
      const double v = lam.unaryExpr([](double l) { return std::sqrt(1 + l * l); }).prod();
      Eigen::SelfAdjointEigenSolver<Matrix> es(H);
      CHECK(es.eigenvalues().minCoeff() >= std::cos(beta0) * v - 1e-9);
    }
  }
}

TEST_CASE("T embedding") {
  CHECK(t_embedding(Matrix::Zero(3, 2)).norm() == 0.0);
  CHECK(t_embedding_inverse(Vector::Zero(6), 3, 2).norm() == 0.0);
  Engine rng = substream(11, 0);
  double worst_norm = 0.0, worst_trip = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Matrix Z = random_matrix(rng, 3, 2, trial % 3 == 0 ? 1e-4 : 1.0);
    const Vector y = t_embedding(Z);
    worst_norm = std::max(worst_norm, std::abs(y.norm() - (v_of_chart(Z) - 1.0)));
    worst_trip = std::max(worst_trip, max_abs(t_embedding_inverse(y, 3, 2) - Z));
  }
  CHECK(worst_norm < 1e-10);
  CHECK(worst_trip < 1e-8);
  CHECK_THROWS_AS(t_embedding_inverse(Vector::Ones(5), 3, 2), DimensionMismatch);
}
