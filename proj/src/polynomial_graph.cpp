#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gbl/graph_geometry.hpp"

namespace gbl {

namespace {

using nlohmann::json;

struct Monomial {
  std::vector<int> exponents;
  double coeff;
};

using Polynomial = std::vector<Monomial>;

// Coefficient times prod_i x_i^{e_i}, differentiated along d1 and d2 (-1: none).
double monomial_value(const Monomial& mono, const Vector& x, int d1, int d2) {
  double factor = mono.coeff;
  std::vector<int> e = mono.exponents;
  for (int d : {d1, d2}) {
    if (d < 0) continue;
    if (e[d] == 0) return 0.0;
    factor *= e[d]--;
  }
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < e[i]; ++k) factor *= x(static_cast<Eigen::Index>(i));
  return factor;
}

double poly_value(const Polynomial& p, const Vector& x, int d1 = -1, int d2 = -1) {
  double s = 0.0;
  for (const auto& mono : p) s += monomial_value(mono, x, d1, d2);
  return s;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidGraphSpec(std::string("graph spec: missing field '") + key + "'");
  return j.at(key);
}

int positive_int(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw InvalidGraphSpec(std::string("graph spec: '") + key + "' must be a positive integer");
  return v.get<int>();
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw InvalidGraphSpec("graph spec: " + what + " must be a number");
  return v.get<double>();
}

GraphImmersion affine_from_json(const json& j) {
  const json& A = field(j, "A");
  if (!A.is_array() || A.empty() || !A[0].is_array() || A[0].empty())
    throw InvalidGraphSpec("graph spec: 'A' must be a non-empty matrix");
  const auto m = static_cast<Eigen::Index>(A.size()), n = static_cast<Eigen::Index>(A[0].size());
  Matrix M(m, n);
  for (Eigen::Index r = 0; r < m; ++r) {
    if (!A[r].is_array() || static_cast<Eigen::Index>(A[r].size()) != n)
      throw InvalidGraphSpec("graph spec: rows of 'A' must have equal length");
    for (Eigen::Index c = 0; c < n; ++c) M(r, c) = number(A[r][c], "A entry");
  }
  Vector b = Vector::Zero(m);
  if (j.contains("b")) {
    const json& bj = j.at("b");
    if (!bj.is_array() || static_cast<Eigen::Index>(bj.size()) != m)
      throw InvalidGraphSpec("graph spec: 'b' must have one entry per row of 'A'");
    for (Eigen::Index r = 0; r < m; ++r) b(r) = number(bj[r], "b entry");
  }
  return affine_graph(M, b);
}

GraphImmersion polynomial_from_json(const json& j) {
  const int n = positive_int(j, "n");
  const int m = positive_int(j, "m");
  const json& comps = field(j, "components");
  if (!comps.is_array() || static_cast<int>(comps.size()) != m)
    throw InvalidGraphSpec("graph spec: 'components' must list m polynomials");
  std::vector<Polynomial> polys;
  for (const json& comp : comps) {
    const json& monos = field(comp, "monomials");
    if (!monos.is_array()) throw InvalidGraphSpec("graph spec: 'monomials' must be an array");
    Polynomial p;
    for (const json& mono : monos) {
      const json& ex = field(mono, "exponents");
      if (!ex.is_array() || static_cast<int>(ex.size()) != n)
        throw InvalidGraphSpec("graph spec: exponents must have length n");
      Monomial out{{}, number(field(mono, "coeff"), "coeff")};
      for (const json& e : ex) {
        if (!e.is_number_integer() || e.get<long long>() < 0 || e.get<long long>() > 64)
          throw InvalidGraphSpec("graph spec: exponents must be nonnegative integers");
        out.exponents.push_back(e.get<int>());
      }
      p.push_back(std::move(out));
    }
    polys.push_back(std::move(p));
  }
  const std::string name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>()
                                                                           : std::string("polynomial");
  auto eval = [polys](const Vector& x) -> Vector {
    Vector f(static_cast<Eigen::Index>(polys.size()));
    for (std::size_t a = 0; a < polys.size(); ++a) f(static_cast<Eigen::Index>(a)) = poly_value(polys[a], x);
    return f;
  };
  auto jac = [polys, n](const Vector& x) -> Matrix {
    Matrix J(static_cast<Eigen::Index>(polys.size()), n);
    for (std::size_t a = 0; a < polys.size(); ++a)
      for (int i = 0; i < n; ++i) J(static_cast<Eigen::Index>(a), i) = poly_value(polys[a], x, i);
    return J;
  };
  auto hess = [polys, n](const Vector& x) {
    std::vector<Matrix> H(polys.size(), Matrix(n, n));
    for (std::size_t a = 0; a < polys.size(); ++a)
      for (int i = 0; i < n; ++i)
        for (int k = i; k < n; ++k) H[a](i, k) = H[a](k, i) = poly_value(polys[a], x, i, k);
    return H;
  };
  return GraphImmersion(name, n, m, eval, jac, hess);
}

}  // namespace

GraphImmersion graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidGraphSpec(std::string("graph spec: ") + e.what());
  }
  if (!j.is_object()) throw InvalidGraphSpec("graph spec: top level must be an object");
  if (j.contains("components")) return polynomial_from_json(j);
  const json& name = field(j, "name");
  if (!name.is_string()) throw InvalidGraphSpec("graph spec: 'name' must be a string");
  if (name == "affine" && j.contains("A")) return affine_from_json(j);
  return builtin(name.get<std::string>());
}

GraphImmersion graph_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidGraphSpec("graph spec: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return graph_from_json(ss.str());
}

}  // namespace gbl
