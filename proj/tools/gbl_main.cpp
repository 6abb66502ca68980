#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gbl/campaigns.hpp"
#include "gbl/errors.hpp"

namespace {

constexpr int kUsageExit = 2;

struct Flags {
  std::string command;
  std::optional<int> n, m;
  std::optional<double> beta0, a, b, tolerance;
  std::optional<std::size_t> samples;
  std::uint64_t seed = 42;
  double fd_step = 1e-3;
  std::string out, format = "json", example, graph_spec, which = "all", cloud;
  std::vector<double> point;
  int steps = 9;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--n", f.n, "plane dimension");
  sub->add_option("--m", f.m, "codimension");
  sub->add_option("--beta0", f.beta0, "slope bound");
  sub->add_option("--a", f.a, "outer bound (shrink)");
  sub->add_option("--b", f.b, "current bound (shrink)");
  sub->add_option("--samples", f.samples, "sample count");
  sub->add_option("--seed", f.seed, "root seed");
  sub->add_option("--fd-step", f.fd_step, "finite-difference step");
  sub->add_option("--example", f.example, "builtin graph: holomorphic_pair, lawson_osserman, affine");
  sub->add_option("--point", f.point, "evaluation point, comma separated")->delimiter(',');
  sub->add_option("--graph-spec", f.graph_spec, "JSON graph specification")->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output file (default stdout)");
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--tolerance", f.tolerance, "check tolerance");
  sub->add_option("--which", f.which, "lemmas subset: aux, pair, es, IV, omega, all");
  sub->add_option("--cloud", f.cloud, "JSON array of chart matrices (shrink)")->check(CLI::ExistingFile);
  sub->add_option("--steps", f.steps, "grid size (sweep-k0)");
}

gbl::RunConfig to_config(const Flags& f) {
  gbl::RunConfig c;
  c.command = gbl::parse_command(f.command);
  c.n = f.n;
  c.m = f.m;
  c.beta0 = f.beta0;
  c.a = f.a;
  c.b = f.b;
  c.tolerance = f.tolerance;
  c.samples = f.samples;
  c.seed = f.seed;
  c.fd_step = f.fd_step;
  c.out_path = f.out;
  c.format = f.format == "csv" ? gbl::OutputFormat::Csv : gbl::OutputFormat::Json;
  c.example = f.example;
  c.point = f.point;
  c.graph_spec = f.graph_spec;
  c.which = f.which;
  c.cloud = f.cloud;
  c.steps = f.steps;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of the Gauss-map subharmonicity estimates"};
  app.set_version_flag("--version", gbl::tool_version());
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"certify", "compute and audit K0(beta0)"},
      {"lemmas", "auxiliary extrema and quadratic-form lemmas"},
      {"graph", "geometry of a graph immersion at sample points"},
      {"shrink", "one shrinking step and the iteration on a cloud"},
      {"sweep-k0", "K0 over a beta0 grid"},
      {"cross-validate", "closed-form Laplacian against finite differences"}};
  for (auto [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    sub->callback([&flags, sub] { flags.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    const auto config = gbl::resolve(to_config(flags));
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = gbl::run(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string text = config.format == gbl::OutputFormat::Csv ? gbl::to_csv(report) : gbl::to_json(report);
    if (config.out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(config.out_path, std::ios::binary);
      if (!out) throw gbl::UsageError("cannot write " + config.out_path);
      out << text;
    }
    std::fprintf(stderr, "%s: %s in %.3f s\n", report.command.c_str(), report.passed() ? "PASS" : "FAIL", wall);
    return report.exit_code();
  } catch (const gbl::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageExit;
  } catch (const gbl::Error& e) {
    std::cerr << "error [" << gbl::to_string(e.kind()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
