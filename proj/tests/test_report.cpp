#include <doctest.h>

#include <clocale>
#include <cstdio>
#include <cmath>
#include <limits>
#include <string>

#include "gbl/campaigns.hpp"
#include "gbl/report.hpp"
#include "gbl/rng.hpp"

using namespace gbl;

TEST_CASE("format_number round-trips") {
  Engine rng = substream(11, 0);
  for (int k = 0; k < 2000; ++k) {
    const double x = std::ldexp(uniform(rng, -1.0, 1.0), static_cast<int>(uniform(rng, -300, 300)));
    CHECK(std::stod(format_number(x)) == x);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    CHECK(format_number(x) == buf);
  }
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(13.5) == "13.5");
  CHECK(format_number(-2.0) == "-2");
}

TEST_CASE("dump_json") {
  Json j;
  j["z"] = 1.5;
  j["a"] = std::numeric_limits<double>::quiet_NaN();
  j["m"] = Json::array({1, 2.25, "s"});
  j["e"] = Json::object();
  CHECK(dump_json(j, 0) == R"({"z":1.5,"a":null,"m":[1,2.25,"s"],"e":{}})");
  CHECK(dump_json(Json{{"x", std::numeric_limits<double>::infinity()}}, 0) == R"({"x":null})");
  CHECK(dump_json(Json{{"k", 1}}) == "{\n  \"k\": 1\n}");
}

TEST_CASE("number formatting ignores the C locale") {
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") != nullptr) CHECK(format_number(2.5) == "2.5");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST_CASE("check records") {
  const auto lo = check_at_most("x", 0.5, 1.0, "claim");
  CHECK(lo.passed);
  CHECK(lo.margin == doctest::Approx(0.5));
  const auto hi = check_at_least("y", 0.5, 1.0, "claim");
  CHECK_FALSE(hi.passed);
  CHECK(hi.margin == doctest::Approx(-0.5));
  CHECK(check_at_least("nan", std::nan(""), 0.0, "").passed == false);
  CHECK(check_at_most("nan", std::nan(""), 0.0, "").passed == false);

  Report r;
  CHECK(r.passed());
  r.checks.push_back(lo);
  CHECK(r.exit_code() == 0);
  r.checks.push_back(hi);
  CHECK(r.exit_code() == 1);
  const std::string text = to_json(r);
  CHECK(text.find("\"schema\": 1") != std::string::npos);
  CHECK(text.find("\"status\": \"FAIL\"") != std::string::npos);
}

TEST_CASE("csv output") {
  Report r;
  r.checks.push_back(check_true("a, \"quoted\" name", true, "plain"));
  CHECK(to_csv(r) == "name,status,value,tolerance,margin,claim\n\"a, \"\"quoted\"\" name\",PASS,1,1,0,plain\n");
  r.table.push_back(Json{{"beta0", 1.0}, {"K0", 0.5}, {"lambdas", Json::array({0.25, 0.125})}});
  r.table.push_back(Json{{"beta0", 2.0}, {"K0", 0.25}});
  CHECK(to_csv(r) == "beta0,K0,lambdas\n1,0.5,0.25 0.125\n2,0.25,\n");
}

TEST_CASE("resolve validates ranges") {
  RunConfig c;
  c.command = Command::Certify;
  const auto r = resolve(c);
  CHECK(*r.n == 4);
  CHECK(*r.m == 3);
  CHECK(*r.beta0 == 2.9);
  c.beta0 = 3.0;
  CHECK_THROWS_AS(resolve(c), UsageError);
  c.beta0 = 0.5;
  CHECK_THROWS_AS(resolve(c), UsageError);
  c.beta0 = 2.0;
  c.n = 2;
  c.m = 3;
  CHECK_THROWS_AS(resolve(c), UsageError);

  RunConfig s;
  s.command = Command::Shrink;
  s.b = 3.5;
  CHECK_THROWS_AS(resolve(s), UsageError);
  RunConfig l;
  l.command = Command::Lemmas;
  l.which = "V";
  CHECK_THROWS_AS(resolve(l), UsageError);
  RunConfig w;
  w.command = Command::SweepK0;
  w.steps = 1;
  CHECK_THROWS_AS(resolve(w), UsageError);
  CHECK_THROWS_AS(parse_command("plot"), UsageError);
  for (auto cmd : {Command::Certify, Command::Lemmas, Command::Graph, Command::Shrink, Command::SweepK0,
                   Command::CrossValidate})
    CHECK(parse_command(to_string(cmd)) == cmd);
}

TEST_CASE("run is reproducible") {
  RunConfig c;
  c.command = Command::Certify;
  c.samples = 2000;
  const auto first = to_json(run(c));
  CHECK(first == to_json(run(c)));
  c.seed = 7;
  CHECK(first != to_json(run(c)));

  RunConfig g;
  g.command = Command::Graph;
  g.example = "lawson_osserman";
  g.point = {1.0, 0.0, 0.0, 0.0};
  const auto rep = run(g);
  CHECK(rep.passed());
  CHECK(rep.config["point"].size() == 4);
  CHECK(to_csv(rep) == to_csv(run(g)));
}
