#pragma once

// Check records and deterministic JSON / CSV serialization of run reports.

#include <string>
#include <vector>

#include <json.hpp>

namespace gbl {

using Json = nlohmann::ordered_json;

struct CheckRecord {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double tolerance = 0.0;  // the limit it is compared against
  double margin = 0.0;     // signed slack, >= 0 exactly when passed
  std::string claim;       // statement being checked
};

// value <= limit.
CheckRecord check_at_most(std::string name, double value, double limit, std::string claim);
// value >= limit.
CheckRecord check_at_least(std::string name, double value, double limit, std::string claim);
CheckRecord check_true(std::string name, bool ok, std::string claim);

struct Report {
  std::string command;
  Json config = Json::object();
  std::vector<CheckRecord> checks;
  Json data = Json::object();
  // Rows for CSV output; each row an object with the same keys.
  Json table = Json::array();
  double wall_seconds = 0.0;  // not serialized; output must be reproducible

  bool passed() const;
  int exit_code() const { return passed() ? 0 : 1; }
};

std::string tool_version();

// 17 significant digits in %g style, with a "." decimal point regardless of locale.
std::string format_number(double x);

// JSON text with numbers written by format_number; non-finite values become null.
std::string dump_json(const Json& j, int indent = 2);

std::string to_json(const Report& report);
// The table if present, else one row per check.
std::string to_csv(const Report& report);

}  // namespace gbl
