#include <cmath>

#include "gbl/graph_geometry.hpp"

namespace gbl {

GraphImmersion affine_graph(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size()) throw InvalidGraphSpec("affine: A has " + std::to_string(A.rows()) + " rows, b has " +
                                                   std::to_string(b.size()) + " entries");
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  return GraphImmersion(
      "affine", n, m, [A, b](const Vector& x) -> Vector { return A * x + b; },
      [A](const Vector&) -> Matrix { return A; },
      [n, m](const Vector&) { return std::vector<Matrix>(m, Matrix::Zero(n, n)); });
}

GraphImmersion holomorphic_pair() {
  auto eval = [](const Vector& x) -> Vector {
    Vector f(2);
    f << x(0) * x(0) - x(1) * x(1), 2.0 * x(0) * x(1);
    return f;
  };
  auto jac = [](const Vector& x) -> Matrix {
    Matrix J(2, 3);
    J << 2.0 * x(0), -2.0 * x(1), 0.0, 2.0 * x(1), 2.0 * x(0), 0.0;
    return J;
  };
  auto hess = [](const Vector&) {
    std::vector<Matrix> H(2, Matrix::Zero(3, 3));
    H[0](0, 0) = 2.0;
    H[0](1, 1) = -2.0;
    H[1](0, 1) = H[1](1, 0) = 2.0;
    return H;
  };
  return GraphImmersion("holomorphic_pair", 3, 2, eval, jac, hess);
}

namespace {

// Quadratic part of the Hopf map, q(x) = |x|^2 eta(x / |x|).
Vector hopf_q(const Vector& x) {
  Vector q(3);
  q << x(0) * x(0) + x(1) * x(1) - x(2) * x(2) - x(3) * x(3), 2.0 * (x(1) * x(2) - x(0) * x(3)),
      2.0 * (x(0) * x(2) + x(1) * x(3));
  return q;
}

Matrix hopf_dq(const Vector& x) {
  Matrix D(3, 4);
  D << 2 * x(0), 2 * x(1), -2 * x(2), -2 * x(3),  //
      -2 * x(3), 2 * x(2), 2 * x(1), -2 * x(0),   //
      2 * x(2), 2 * x(3), 2 * x(0), 2 * x(1);
  return D;
}

std::vector<Matrix> hopf_d2q() {
  std::vector<Matrix> H(3, Matrix::Zero(4, 4));
  H[0].diagonal() << 2, 2, -2, -2;
  H[1](1, 2) = H[1](2, 1) = 2;
  H[1](0, 3) = H[1](3, 0) = -2;
  H[2](0, 2) = H[2](2, 0) = 2;
  H[2](1, 3) = H[2](3, 1) = 2;
  return H;
}

const double kLawsonOssermanScale = std::sqrt(5.0) / 2.0;

}  // namespace

// f = c q(x) / |x|.
GraphImmersion lawson_osserman() {
  const double c = kLawsonOssermanScale;
  auto eval = [c](const Vector& x) -> Vector { return c * hopf_q(x) / x.norm(); };
  auto jac = [c](const Vector& x) -> Matrix {
    const double r = x.norm();
    return c * (hopf_dq(x) / r - hopf_q(x) * x.transpose() / (r * r * r));
  };
  auto hess = [c](const Vector& x) {
    const double r = x.norm(), r3 = r * r * r, r5 = r3 * r * r;
    const Vector q = hopf_q(x);
    const Matrix Dq = hopf_dq(x);
    const auto D2q = hopf_d2q();
    std::vector<Matrix> H(3);
    for (int a = 0; a < 3; ++a) {
      const Vector dqa = Dq.row(a).transpose();
      H[a] = c * (D2q[a] / r - (dqa * x.transpose() + x * dqa.transpose()) / r3 -
                  q(a) * Matrix::Identity(4, 4) / r3 + 3.0 * q(a) * x * x.transpose() / r5);
    }
    return H;
  };
  auto excluded = [](const Vector& x) { return x.norm() < 1e-12; };
  return GraphImmersion("lawson_osserman", 4, 3, eval, jac, hess, std::numeric_limits<double>::infinity(),
                        excluded);
}

GraphImmersion builtin(const std::string& name) {
  if (name == "holomorphic_pair") return holomorphic_pair();
  if (name == "lawson_osserman") return lawson_osserman();
  if (name == "affine") return affine_graph(Matrix::Zero(2, 3), Vector::Zero(2));
  throw UnknownName("unknown builtin graph '" + name + "'");
}

}  // namespace gbl
