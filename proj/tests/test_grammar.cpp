#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cfwalk/errors.hpp"
#include "cfwalk/grammar.hpp"
#include "test_support.hpp"

using namespace cfwalk;

namespace {

struct Built {
  OraclePtr graph;
  ConeTypeTable table;
  Grammar grammar;
};

Built build(OraclePtr g) {
  Built b{g, assign_types(*g, g->root()), {}};
  b.grammar = build_grammar(*g, b.table, g->root());
  return b;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("half-line grammar") {
  auto b = build(testing::dinf_half_line());
  const Grammar& g = b.grammar;
  REQUIRE(g.variables.size() == 3);
  CHECK(g.productions.size() == 7);
  CHECK(g.root_count() == 1);
  const auto text = lines(grammar_text(g));
  REQUIRE(text.size() == 7);
  CHECK(text[0] == "T0.0.0 -> eps");
  CHECK(text[1] == "T0.0.0 -> r T0.0.0");
  CHECK(text[2] == "T0.0.0 -> s T1.0.0 s T0.0.0");
  CHECK(text[3] == "T1.0.0 -> eps");
  CHECK(text[4] == "T1.0.0 -> r T2.0.0 r T1.0.0");
  CHECK(text[5] == "T2.0.0 -> eps");
  CHECK(text[6] == "T2.0.0 -> s T1.0.0 s T2.0.0");

  auto d = dependency_analysis(g);
  REQUIRE(d.components.size() == 2);
  CHECK(d.components[0] == std::vector<int>{0});
  CHECK(d.components[1] == std::vector<int>{1, 2});
  CHECK(d.two_components);
  CHECK(d.root_precedes_essential);
  CHECK(d.all_reachable_from_root);
  CHECK(d.essential == std::vector<int>{1});
}

TEST_CASE("F2 grammar has one variable per cone type") {
  auto b = build(make_free_group(2));
  CHECK(b.grammar.variables.size() == 5);
  auto d = dependency_analysis(b.grammar);
  REQUIRE(d.components.size() == 2);
  CHECK(d.components[1].size() == 4);
  CHECK(d.two_components);
}

TEST_CASE("Z grammar splits the essential part") {
  auto b = build(make_free_group(1));
  auto d = dependency_analysis(b.grammar);
  CHECK(d.components.size() == 3);
  CHECK_FALSE(d.two_components);
  CHECK(d.essential.size() == 2);
  CHECK(d.all_reachable_from_root);
}

TEST_CASE("grammar shape invariants") {
  for (const auto& ng : testing::shipped_graphs()) {
    INFO(ng.name);
    auto b = build(ng.oracle);
    const Grammar& g = b.grammar;
    std::vector<int> eps(g.variables.size(), 0);
    for (const auto& p : g.productions) {
      if (p.shape == Production::Shape::kEpsilon) {
        ++eps[p.lhs];
        continue;
      }
      // Every right side starts with a terminal: no chain rules, and
      // terminals separate variables.
      CHECK(p.first >= 0);
      if (p.shape == Production::Shape::kLinear) CHECK(p.second == -1);
    }
    for (std::size_t v = 0; v < g.variables.size(); ++v)
      CHECK(eps[v] == (g.epsilon(static_cast<int>(v)) ? 1 : 0));
    auto d = dependency_analysis(g);
    CHECK(d.root_precedes_essential);
    CHECK(d.all_reachable_from_root);
  }
}

TEST_CASE("target outside the root piece is rejected") {
  auto f2 = make_free_group(2);
  auto table = assign_types(*f2, f2->root());
  CHECK_THROWS_AS(build_grammar(*f2, table, follow(*f2, f2->root(), "a")), GrammarError);
}

TEST_CASE("small coefficients") {
  auto f2 = build(make_free_group(2));
  auto c = series_coefficients(f2.grammar, 0, StepDistribution::uniform(f2.graph->alphabet()), 4);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == 0.0);
  CHECK(c[2] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(c[3] == 0.0);
  // 12 closed walks reach distance 2, 16 touch o in between.
  CHECK(c[4] == doctest::Approx(28.0 / 256.0).epsilon(1e-15));

  std::vector<mpq_class> quarter(4, mpq_class(1, 4));
  auto exact = series_coefficients_exact(f2.grammar, 0, quarter, 4);
  CHECK(exact[2] == mpq_class(1, 4));
  CHECK(exact[4] == mpq_class(7, 64));  // 28/256

  auto half = build(testing::dinf_half_line());
  auto h = series_coefficients(half.grammar, 0, StepDistribution::uniform(half.graph->alphabet()), 3);
  CHECK(h[0] == 1.0);
  CHECK(h[1] == 0.5);
  CHECK(h[2] == 0.5);
  for (std::size_t v = 0; v < half.grammar.variables.size(); ++v)
    CHECK(series_coefficients(half.grammar, static_cast<int>(v),
                              StepDistribution::uniform(half.graph->alphabet()), 0)[0] == 1.0);
}

TEST_CASE("grammar series equal brute-force ball powers") {
  for (const auto& ng : testing::shipped_graphs()) {
    INFO(ng.name);
    auto b = build(ng.oracle);
    const auto mu = StepDistribution::uniform(ng.oracle->alphabet());
    const int N = 20;
    auto table = series_all(b.grammar, mu, N);
    for (int x = 0; x < b.grammar.root_count(); ++x) {
      auto brute = testing::brute_force_series(*ng.oracle, mu, b.table.pieces[0].vertices[x],
                                               ng.oracle->root(), N);
      for (int n = 0; n <= N; ++n) {
        const double got = table.scaled[x][n];
        const double want = brute[n];
        if (want == 0.0)
          CHECK(got == 0.0);
        else
          CHECK(std::abs(got - want) <= 1e-12 * want);
      }
    }
  }
}

TEST_CASE("coefficients are sub-probabilities") {
  for (const auto& ng : testing::shipped_graphs()) {
    INFO(ng.name);
    auto b = build(ng.oracle);
    auto t = series_all(b.grammar, StepDistribution::uniform(ng.oracle->alphabet()), 200);
    for (const auto& col : t.scaled)
      for (double c : col) {
        CHECK(c >= 0.0);
        CHECK(c <= 1.0 + 1e-15);
      }
  }
}

TEST_CASE("exact and floating series agree") {
  auto b = build(testing::z2_cubed_mod_r());
  std::vector<mpq_class> third(3, mpq_class(1, 3));
  std::vector<double> third_d(3, 1.0 / 3.0);
  auto exact = series_coefficients_exact(b.grammar, 0, third, 40);
  auto approx = series_coefficients(b.grammar, 0, StepDistribution{third_d}, 40);
  for (int n = 0; n <= 40; ++n) {
    const double e = exact[n].get_d();
    CHECK(std::abs(approx[n] - e) <= 1e-13 * e);
  }
  CHECK_THROWS_AS(series_coefficients_exact(b.grammar, 0, third, 51), ConfigurationError);
}

TEST_CASE("scaling leaves log coefficients unchanged") {
  auto b = build(make_free_group(2));
  const auto mu = StepDistribution::uniform(b.graph->alphabet());
  auto plain = series_all(b.grammar, mu, 300);
  auto scaled = series_all(b.grammar, mu, 300, 1.15);
  for (int n = 0; n <= 300; n += 2)
    CHECK(scaled.log_value(0, n) == doctest::Approx(plain.log_value(0, n)).epsilon(1e-12));
  CHECK(std::isinf(plain.log_value(0, 1)));
}

TEST_CASE("grammar exports") {
  auto b = build(testing::dinf_half_line());
  const auto js = grammar_json(b.grammar);
  CHECK(js.find("\"T1.0.0\"") != std::string::npos);
  const auto dot = dependency_dot(b.grammar, dependency_analysis(b.grammar));
  CHECK(dot.find("\"T0.0.0\" -> \"T1.0.0\"") != std::string::npos);
  const auto csv = series_csv({"p"}, {{1.0, 0.5}});
  CHECK(csv == "n,p\n0,1\n1,0.5\n");
}
