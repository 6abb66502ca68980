#include "gbl/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#ifndef GBL_VERSION
#define GBL_VERSION "0.1.0"
#endif

namespace gbl {

namespace {

CheckRecord make_record(std::string name, bool ok, double value, double limit, double margin, std::string claim) {
  CheckRecord r;
  r.name = std::move(name);
  r.passed = ok;
  r.value = value;
  r.tolerance = limit;
  r.margin = margin;
  r.claim = std::move(claim);
  return r;
}

void write_string(std::ostringstream& out, const std::string& s) { out << Json(s).dump(); }

void write_json(std::ostringstream& out, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad;
        write_string(out, it.key());
        out << sep;
        write_json(out, it.value(), indent, depth + 1);
      }
      out << nl << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << '[' << nl;
      bool first = true;
      for (const auto& v : j) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad;
        write_json(out, v, indent, depth + 1);
      }
      out << nl << close_pad << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out << (std::isfinite(x) ? format_number(x) : "null");
      return;
    }
    default:
      out << j.dump();
  }
}

std::string csv_cell(const Json& v) {
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  if (v.is_array()) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : " ") + csv_cell(x);
    return s;
  }
  return v.dump();
}

}  // namespace

CheckRecord check_at_most(std::string name, double value, double limit, std::string claim) {
  return make_record(std::move(name), value <= limit, value, limit, limit - value, std::move(claim));
}

CheckRecord check_at_least(std::string name, double value, double limit, std::string claim) {
  return make_record(std::move(name), value >= limit, value, limit, value - limit, std::move(claim));
}

CheckRecord check_true(std::string name, bool ok, std::string claim) {
  return make_record(std::move(name), ok, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : -1.0, std::move(claim));
}

bool Report::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string tool_version() { return GBL_VERSION; }

std::string format_number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string dump_json(const Json& j, int indent) {
  std::ostringstream out;
  write_json(out, j, indent, 0);
  return out.str();
}

std::string to_json(const Report& report) {
  Json j;
  j["schema"] = 1;
  j["tool"] = "gbl";
  j["version"] = tool_version();
  j["command"] = report.command;
  j["config"] = report.config;
  j["status"] = report.passed() ? "PASS" : "FAIL";
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"status", c.passed ? "PASS" : "FAIL"},
                      {"value", c.value},
                      {"tolerance", c.tolerance},
                      {"margin", c.margin},
                      {"claim", c.claim}});
  }
  j["checks"] = checks;
  j["data"] = report.data;
  if (!report.table.empty()) j["table"] = report.table;
  return dump_json(j) + "\n";
}

std::string to_csv(const Report& report) {
  std::ostringstream out;
  if (!report.table.empty()) {
    std::vector<std::string> keys;
    for (auto it = report.table[0].begin(); it != report.table[0].end(); ++it) keys.push_back(it.key());
    for (std::size_t k = 0; k < keys.size(); ++k) out << (k ? "," : "") << keys[k];
    out << '\n';
    for (const auto& row : report.table) {
      for (std::size_t k = 0; k < keys.size(); ++k)
        out << (k ? "," : "") << (row.contains(keys[k]) ? csv_cell(row.at(keys[k])) : "");
      out << '\n';
    }
    return out.str();
  }
  out << "name,status,value,tolerance,margin,claim\n";
  for (const auto& c : report.checks)
    out << csv_cell(c.name) << ',' << (c.passed ? "PASS" : "FAIL") << ',' << format_number(c.value) << ','
        << format_number(c.tolerance) << ',' << format_number(c.margin) << ',' << csv_cell(c.claim) << '\n';
  return out.str();
}

}  // namespace gbl
