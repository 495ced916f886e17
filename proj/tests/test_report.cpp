#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "cfwalk/errors.hpp"
#include "cfwalk/report.hpp"

using namespace cfwalk;

namespace {

const char* kHalfLine = R"({
  "name": "half",
  "graph": {"family": "schreier",
            "factors": [{"order": 2, "names": ["r"]}, {"order": 2, "names": ["s"]}],
            "subgroup": ["r"]},
  "mu": {"r": 0.5, "s": 0.5},
  "series": {"n": 400}
})";

int config_error_code(const std::string& text) {
  try {
    parse_config(text);
  } catch (const std::exception& e) {
    return exit_code_for(e);
  }
  return 0;
}

int count_lines(const std::string& s) {
  std::istringstream in(s);
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_CASE("config parsing and defaults") {
  auto c = parse_config(kHalfLine);
  CHECK(c.name == "half");
  CHECK(c.series_n == 400);
  CHECK(c.n_ball == 20);
  CHECK(c.classify_tol == 1e-6);
  CHECK(c.output_dir == "out/half");
  CHECK(c.mu.at("r") == 0.5);
  CHECK(config_hash(c).size() == 16);
  CHECK(config_hash(c) == config_hash(parse_config(kHalfLine)));
  auto d = parse_config(R"({"name": "half", "graph": {"family": "free_group", "rank": 2}})");
  CHECK(config_hash(c) != config_hash(d));
  CHECK(d.mu.empty());
  // The canonical form parses back to the same config.
  CHECK(config_canonical(parse_config(config_canonical(c))) == config_canonical(c));
}

TEST_CASE("config errors map to exit code 2") {
  CHECK(config_error_code(R"({"graph": {"family": "free_group", "rank": 2},
                              "mu": {"a": 0.5, "A": 0.5}})") == 2);
  CHECK(config_error_code(R"({"graph": {"family": "free_group", "rank": 2},
                              "mu": {"a": 0.25, "A": 0.25, "b": 0.25, "B": 0.25, "c": 0.0}})") == 2);
  CHECK(config_error_code(R"({"graph": {"family": "free_group", "rank": 2},
                              "mu": {"a": 0.5, "A": 0.3, "b": 0.1, "B": 0.05}})") == 2);
  CHECK(config_error_code(R"({"graph": {"family": "torus"}})") == 2);
  CHECK(config_error_code(R"({"graph": {"family": "free_group", "rank": 2}, "series": {"n": 100}})") == 2);
  CHECK(config_error_code(R"({"graph": {"family": "free_group", "rank": 2},
                              "tolerances": {"classify": 0}})") == 2);
  CHECK(config_error_code(R"({"graph": {"family": "free_group", "rank": 2}, "colour": 1})") == 2);
  CHECK(config_error_code(R"({"graph": {"family": "free_group", "rank": 2})") == 2);
  CHECK(config_error_code(R"({"mu": "uniform"})") == 2);
  CHECK(config_error_code(R"({"graph": {"family": "schreier", "rank": 2, "subgroup": ["x"]}})") == 2);
  CHECK(config_error_code(R"({"graph": {"family": "free_group", "rank": 2}, "origin": "q"})") == 2);
  CHECK(config_error_code(kHalfLine) == 0);

  // Valid syntax, but the origin leaves the root piece.
  auto far = parse_config(R"({"graph": {"family": "free_group", "rank": 2}, "origin": "ab"})");
  try {
    run_validate(far);
    FAIL("expected a configuration error");
  } catch (const std::exception& e) {
    CHECK(exit_code_for(e) == 2);
  }
}

TEST_CASE("uncertified types map to exit code 3") {
  auto c = parse_config(R"({"graph": {"family": "free_group", "rank": 2},
                            "types": {"first_depth": 4, "max_radius": 4}})");
  try {
    run_analyze(c);
    FAIL("expected a certification error");
  } catch (const std::exception& e) {
    CHECK(exit_code_for(e) == 3);
  }
  CHECK(exit_code_for(SpectralError("x")) == 1);
}

TEST_CASE("exports") {
  auto c = parse_config(kHalfLine);
  auto types = run_export(c, "types-dot").at("types.dot");
  CHECK(types.find("1 -> 2") != std::string::npos);
  CHECK(types.find("2 -> 1") != std::string::npos);
  auto grammar = run_export(c, "grammar").at("grammar.txt");
  CHECK(count_lines(grammar) == 7);
  CHECK(grammar.find("T0.0.0 -> eps") != std::string::npos);
  auto csv = run_export(c, "series-csv").at("series.csv");
  CHECK(csv.rfind("n,p\n0,1e+0\n1,5e-1\n", 0) == 0);
  CHECK(count_lines(csv) == 402);
  CHECK(run_export(c, "ball-dot").at("ball.dot").find("graph") != std::string::npos);
  CHECK(run_export(c, "depgraph-dot").count("depgraph.dot") == 1);
  CHECK(run_export(c, "types-json").at("types.json").find("\"r\": 2") != std::string::npos);
  CHECK(run_export(c, "grammar-json").count("grammar.json") == 1);
  CHECK(run_export(c, "lambda-csv").at("lambda.csv").rfind("z,lambda,", 0) == 0);
  CHECK_THROWS_AS(run_export(c, "pdf"), ConfigurationError);
  for (const auto& kind : export_kinds())
    CHECK(run_export(c, kind) == run_export(c, kind));
}

TEST_CASE("analyze reports are deterministic and complete") {
  auto c = parse_config(kHalfLine);
  auto a = run_analyze(c);
  auto b = run_analyze(c);
  CHECK(a.json == b.json);
  CHECK(a.exit_code == 0);
  CHECK(a.json.find("\"schema_version\": 1") != std::string::npos);
  CHECK(a.json.find("\"config_hash\": \"" + config_hash(c) + "\"") != std::string::npos);
  CHECK(a.json.find("\"case\": \"b\"") != std::string::npos);
  CHECK(a.json.find("\"source\": \"ball-exact\"") != std::string::npos);
  for (const auto& chk : a.checks) {
    INFO(chk.name);
    CHECK(chk.passed);
  }

  auto v = run_validate(c);
  CHECK(v.exit_code == 0);
  CHECK(v.checks.size() == 4);
}

TEST_CASE("the integer line completes with the irreducibility caveat") {
  auto c = parse_config(R"({"name": "z", "graph": {"family": "free_group", "rank": 1}, "series": {"n": 1000}})");
  auto r = run_analyze(c);
  CHECK(r.exit_code == 0);
  bool caveat = false;
  for (const auto& w : r.warnings)
    if (w.find("not irreducible") != std::string::npos) caveat = true;
  CHECK(caveat);
  CHECK(r.json.find("\"irreducible\": false") != std::string::npos);
}

TEST_CASE("thread count from the environment") {
  const char* saved = std::getenv("CFWALK_THREADS");
  const std::string keep = saved ? saved : "";
  setenv("CFWALK_THREADS", "4", 1);
  CHECK(thread_count() == 4);
  setenv("CFWALK_THREADS", "zero", 1);
  CHECK(thread_count() == 1);
  setenv("CFWALK_THREADS", "-2", 1);
  CHECK(thread_count() == 1);
  unsetenv("CFWALK_THREADS");
  CHECK(thread_count() == 1);
  if (saved) setenv("CFWALK_THREADS", keep.c_str(), 1);
}
