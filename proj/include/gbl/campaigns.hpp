#pragma once

// Run configuration and dispatch of the verification campaigns behind each
// command-line subcommand.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbl/report.hpp"

namespace gbl {

// Invalid command-line or configuration values; the tool exits with code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Command { Certify, Lemmas, Graph, Shrink, SweepK0, CrossValidate };
enum class OutputFormat { Json, Csv };

std::string to_string(Command c);
// Throws UsageError for unknown names.
Command parse_command(const std::string& name);

struct RunConfig {
  Command command = Command::Certify;
  // Unset values take the per-command defaults listed in resolve().
  std::optional<int> n, m;
  std::optional<double> beta0, a, b, tolerance;
  std::optional<std::size_t> samples;
  std::uint64_t seed = 42;
  double fd_step = 1e-3;
  std::string out_path;
  OutputFormat format = OutputFormat::Json;
  std::string example;     // builtin graph name
  std::vector<double> point;
  std::string graph_spec;  // JSON graph-spec file
  std::string which = "all";
  std::string cloud;       // JSON file of chart matrices
  int steps = 9;           // sweep-k0 grid size
};

// Fills per-command defaults and validates ranges; throws UsageError.
//   certify:        n 4, m 3, beta0 2.9 in [1, 3), samples 100000, tolerance 1e-9
//   lemmas:         which in {aux, pair, es, IV, omega, all}, samples 100000, tolerance 1e-10
//   graph:          example holomorphic_pair, samples 20 (without --point), tolerance 1e-3
//   shrink:         a 3, b 2.8, beta0 2.9, n = m = 2, samples 10000
//   sweep-k0:       n 4, m 3, beta0 2.99 (last grid point), steps 9, samples 20000
//   cross-validate: samples 50, tolerance 1e-3
RunConfig resolve(RunConfig config);

Json config_to_json(const RunConfig& config);

// Runs a resolved configuration. Library errors propagate.
Report run(const RunConfig& config);

}  // namespace gbl
