#include <algorithm>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gbl/campaigns.hpp"
#include "gbl/certifier.hpp"
#include "gbl/errors.hpp"
#include "gbl/graph_geometry.hpp"
#include "gbl/grassmann.hpp"
#include "gbl/lemmas.hpp"
#include "gbl/shrinking.hpp"

namespace py = pybind11;
using namespace gbl;

namespace {

template <class T>
std::optional<T> opt(const py::kwargs& kw, const char* key) {
  if (!kw.contains(key) || kw[key].is_none()) return std::nullopt;
  return kw[key].cast<T>();
}

RunConfig config_from_kwargs(const std::string& command, const py::kwargs& kw) {
  static const char* known[] = {"n",       "m",     "beta0", "a",     "b",          "samples",
                                "seed",    "fd_step", "tolerance", "example", "point", "graph_spec",
                                "which",   "cloud", "steps", "format"};
  for (auto item : kw) {
    const auto key = item.first.cast<std::string>();
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw UsageError("unknown option '" + key + "'");
  }
  RunConfig c;
  c.command = parse_command(command);
  c.n = opt<int>(kw, "n");
  c.m = opt<int>(kw, "m");
  c.beta0 = opt<double>(kw, "beta0");
  c.a = opt<double>(kw, "a");
  c.b = opt<double>(kw, "b");
  c.samples = opt<std::size_t>(kw, "samples");
  c.tolerance = opt<double>(kw, "tolerance");
  if (auto v = opt<std::uint64_t>(kw, "seed")) c.seed = *v;
  if (auto v = opt<double>(kw, "fd_step")) c.fd_step = *v;
  if (auto v = opt<std::string>(kw, "example")) c.example = *v;
  if (auto v = opt<std::vector<double>>(kw, "point")) c.point = *v;
  if (auto v = opt<std::string>(kw, "graph_spec")) c.graph_spec = *v;
  if (auto v = opt<std::string>(kw, "which")) c.which = *v;
  if (auto v = opt<std::string>(kw, "cloud")) c.cloud = *v;
  if (auto v = opt<int>(kw, "steps")) c.steps = *v;
  if (auto v = opt<std::string>(kw, "format")) {
    if (*v != "json" && *v != "csv") throw UsageError("format must be json or csv");
    c.format = *v == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  }
  return c;
}

py::dict certificate_dict(const CertificateReport& r) {
  py::dict d;
  d["n"] = r.n;
  d["m"] = r.m;
  d["beta0"] = r.beta0;
  d["K0"] = r.K0;
  d["argmin_lambdas"] = r.argmin_lambda.lambdas;
  d["audit_min_ratio"] = r.audit_min_ratio;
  d["worst_violation"] = r.worst_violation;
  d["full_matrix_check"] = r.full_matrix_check;
  d["evaluations"] = r.evaluations;
  d["budget_exhausted"] = r.budget_exhausted;
  return d;
}

}  // namespace

PYBIND11_MODULE(gbl, mod) {
  mod.doc() = "Grassmannian v-function, the K0 certifier, graph geometry and the shrinking step.";
  mod.attr("__version__") = tool_version();

  static py::exception<Error> error(mod, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const UsageError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<GrassmannPoint>(mod, "GrassmannPoint")
      .def(py::init(&GrassmannPoint::from_rows), py::arg("rows"))
      .def_static("canonical", &GrassmannPoint::canonical, py::arg("n"), py::arg("m"))
      .def_property_readonly("n", &GrassmannPoint::n)
      .def_property_readonly("m", &GrassmannPoint::m)
      .def_property_readonly("frame", &GrassmannPoint::frame)
      .def("projector", &GrassmannPoint::projector)
      .def("__repr__", [](const GrassmannPoint& P) {
        return "<GrassmannPoint n=" + std::to_string(P.n()) + " m=" + std::to_string(P.m()) + ">";
      });

  mod.def("w_pairing", &w_pairing, py::arg("P"), py::arg("Q"));
  mod.def("v_value", &v_value, py::arg("P"), py::arg("P0"));
  mod.def("v_of_chart", &v_of_chart, py::arg("Z"));
  mod.def("distance", &distance, py::arg("P"), py::arg("Q"));
  mod.def("jordan_angles", [](const GrassmannPoint& P, const GrassmannPoint& Q) { return jordan_decompose(P, Q).thetas; },
          py::arg("P"), py::arg("Q"));
  mod.def("geodesic", &geodesic, py::arg("Q"), py::arg("P1"), py::arg("t"));
  mod.def("from_chart", [](const Matrix& Z, const GrassmannPoint& P0) { return from_chart({Z}, P0); }, py::arg("Z"),
          py::arg("P0"));
  mod.def("to_chart", [](const GrassmannPoint& P, const GrassmannPoint& P0) { return to_chart(P, P0).Z; },
          py::arg("P"), py::arg("P0"));
  mod.def("hessian_v", [](const GrassmannPoint& P, const GrassmannPoint& P0) { return hessian_v(P, P0).hessian; },
          py::arg("P"), py::arg("P0"));
  mod.def("in_bjx", &in_bjx, py::arg("P"), py::arg("P0"));
  mod.def("t_embedding", &t_embedding, py::arg("Z"));
  mod.def("t_embedding_inverse", &t_embedding_inverse, py::arg("y"), py::arg("n"), py::arg("m"));

  mod.def("quadratic_form_matrix",
          [](int n, const Vector& lambdas) { return quadratic_form_matrix(LambdaProfile::make(n, lambdas)); },
          py::arg("n"), py::arg("lambdas"));
  mod.def("min_form_eigenvalue",
          [](int n, const Vector& lambdas) { return min_form_eigenvalue(LambdaProfile::make(n, lambdas)); },
          py::arg("n"), py::arg("lambdas"));
  mod.def(
      "compute_K0",
      [](int n, int m, double beta0, std::size_t audit_samples, std::uint64_t seed) {
        K0Options o;
        o.audit_samples = audit_samples;
        o.seed = seed;
        CertificateReport r;
        {
          py::gil_scoped_release release;
          r = compute_K0(n, m, beta0, o);
        }
        return certificate_dict(r);
      },
      py::arg("n") = 4, py::arg("m") = 3, py::arg("beta0") = 2.9, py::arg("audit_samples") = 100000,
      py::arg("seed") = 42);
  mod.def(
      "find_epsilon0", [](int m, double v_bound) { return find_epsilon0(m, v_bound).eps0; }, py::arg("m"),
      py::arg("v_bound") = 3.0);
  mod.def("auxiliary_extrema", [] {
    py::list rows;
    for (const auto& r : auxiliary_extrema()) {
      py::dict d;
      d["name"] = r.name;
      d["computed_min"] = r.computed_min;
      d["closed_form"] = r.closed_form;
      d["argmin"] = r.argmin;
      d["closed_argmin"] = r.closed_argmin;
      rows.append(d);
    }
    return rows;
  });

  py::class_<GraphImmersion>(mod, "GraphImmersion")
      .def_property_readonly("name", &GraphImmersion::name)
      .def_property_readonly("n", &GraphImmersion::n)
      .def_property_readonly("m", &GraphImmersion::m)
      .def("eval", &GraphImmersion::eval, py::arg("x"))
      .def("jacobian", &GraphImmersion::jacobian, py::arg("x"));
  mod.def("builtin_graph", &builtin, py::arg("name"));
  mod.def("graph_from_json", &graph_from_json, py::arg("text"));
  mod.def(
      "point_geometry",
      [](const GraphImmersion& G, const Vector& x) {
        const auto pg = point_geometry(G, x);
        py::dict d;
        d["slope"] = pg.slope;
        d["normB2"] = pg.normB2;
        d["meanH"] = pg.meanH;
        d["lambdas"] = pg.lambda.lambdas;
        d["gauss"] = pg.gauss;
        return d;
      },
      py::arg("G"), py::arg("x"));
  mod.def("laplacian_v_closed_form", &laplacian_v_closed_form, py::arg("G"), py::arg("x"), py::arg("P0"));
  mod.def("laplacian_v_finite_difference", &laplacian_v_finite_difference, py::arg("G"), py::arg("x"),
          py::arg("P0"), py::arg("step") = 1e-3);

  mod.def("shrink_threshold", &shrink_threshold, py::arg("a"));
  mod.def(
      "compute_epsilon1",
      [](double a, double beta0, int n, int m) {
        const auto r = compute_epsilon1(a, beta0, n, m);
        py::dict d;
        d["epsilon1"] = r.epsilon1;
        d["epsilon2"] = r.epsilon2;
        d["first_branch"] = r.first_branch;
        d["omega_empty"] = r.omega_empty;
        d["argmin_b"] = r.argmin_b;
        d["argmin_thetas"] = r.argmin_thetas;
        return d;
      },
      py::arg("a"), py::arg("beta0"), py::arg("n"), py::arg("m"));
  mod.def(
      "shrink_center",
      [](const GrassmannPoint& P1, const GrassmannPoint& Q, double a, double b, double beta0) {
        const auto r = shrink_center(P1, Q, ShrinkParameters::make(a, b, beta0));
        py::dict d;
        d["P2"] = r.P2;
        d["case"] = to_string(r.kind);
        d["t0"] = r.t0;
        d["new_bound_on_Q"] = r.new_bound_on_Q;
        return d;
      },
      py::arg("P1"), py::arg("Q"), py::arg("a"), py::arg("b"), py::arg("beta0"));

  mod.def(
      "run",
      [](const std::string& command, py::kwargs kw) {
        const RunConfig c = resolve(config_from_kwargs(command, kw));
        Report r;
        {
          py::gil_scoped_release release;
          r = run(c);
        }
        const std::string text = c.format == OutputFormat::Csv ? to_csv(r) : to_json(r);
        return py::make_tuple(text, r.exit_code());
      },
      py::arg("command"),
      "Runs a campaign like the command-line tool; returns (report text, exit code).");
}
