#include <doctest.h>

#include "cfwalk/cone_description.hpp"
#include "cfwalk/errors.hpp"
#include "cfwalk/groups.hpp"
#include "test_support.hpp"

using namespace cfwalk;

TEST_CASE("label inversion is an involution") {
  auto z = make_free_group(1);
  CHECK(z->alphabet().invert_label("a") == "A");
  CHECK(z->alphabet().invert_label(z->alphabet().invert_label("a")) == "a");
  auto dinf = make_free_product({GroupFactor::cyclic(2, {"r"}), GroupFactor::cyclic(2, {"s"})});
  CHECK(dinf->alphabet().invert_label("r") == "r");
  CHECK_THROWS_AS(z->alphabet().invert_label("q"), AlphabetError);
}

TEST_CASE("alphabet rejects a non-involutive pairing") {
  using Pairs = std::vector<std::pair<std::string, std::string>>;
  CHECK_THROWS_AS(Alphabet(Pairs{{"a", "b"}, {"b", "c"}, {"c", "a"}}), AlphabetError);
  CHECK_THROWS_AS(Alphabet(Pairs{{"a", "x"}}), AlphabetError);
}

TEST_CASE("free group neighbours and cancellation") {
  auto f2 = make_free_group(2);
  const auto nbrs = f2->neighbors(f2->root());
  REQUIRE(nbrs.size() == 4);
  CHECK(f2->format_key(nbrs[0].second) == "a");
  CHECK(f2->format_key(nbrs[1].second) == "A");
  CHECK(f2->format_key(nbrs[2].second) == "b");
  CHECK(f2->format_key(nbrs[3].second) == "B");
  CHECK(follow(*f2, f2->root(), "aA") == f2->root());
  CHECK(follow(*f2, f2->root(), "abB") == follow(*f2, f2->root(), "a"));
  CHECK(f2->format_key(follow(*f2, f2->root(), "aab")) == "aab");
  CHECK_THROWS_AS(make_free_group(0), ValidationError);
  CHECK_THROWS_AS(f2->neighbor(VertexKey{{0, 1, 0, 1}}, 0), KeyError);
}

TEST_CASE("ball sizes") {
  auto f2 = make_free_group(2);
  CHECK(ball(*f2, f2->root(), 0).size() == 1);
  CHECK(ball(*f2, f2->root(), 0).edges.empty());
  CHECK(ball(*f2, f2->root(), 1).size() == 5);
  for (int n = 0; n <= 6; ++n) {
    std::size_t pow3 = 1;
    for (int k = 0; k < n; ++k) pow3 *= 3;
    CHECK(ball(*f2, f2->root(), n).size() == 1 + 4 * (pow3 - 1) / 2);
  }
  auto z = make_free_group(1);
  CHECK(ball(*z, z->root(), 7).size() == 15);

  auto z2z3 = make_free_product({GroupFactor::cyclic(2, {"a"}), GroupFactor::cyclic(3, {"b", "B"})});
  CHECK(ball(*z2z3, z2z3->root(), 2).size() == 8);

  auto t3 = testing::z2_cubed();
  for (int n = 0; n <= 6; ++n) CHECK(ball(*t3, t3->root(), n).size() == 1 + 3 * ((1u << n) - 1));
  auto line = make_free_product({GroupFactor::cyclic(2, {"r"}), GroupFactor::cyclic(2, {"s"})});
  CHECK(ball(*line, line->root(), 5).size() == 11);
}

TEST_CASE("invalid group tables are rejected") {
  CHECK_THROWS_AS(GroupFactor::finite({{0, 1}, {1, 1}}, {"x"}), ValidationError);
  CHECK_THROWS_AS(GroupFactor::finite({{1, 0}, {0, 1}}, {"x"}), ValidationError);
  CHECK_THROWS_AS(make_free_product({GroupFactor::cyclic(2, {"r"})}), ValidationError);
}

TEST_CASE("half-line Schreier graph of the infinite dihedral group") {
  auto half = testing::dinf_half_line();
  const auto o = half->root();
  const Label r = half->alphabet().find("r");
  const Label s = half->alphabet().find("s");
  CHECK(half->neighbor(o, r) == o);
  const auto one = half->neighbor(o, s);
  CHECK(one != o);
  CHECK(half->neighbor(one, s) == o);
  auto view = ball(*half, o, 3);
  CHECK(view.size() == 4);
  for (int n = 0; n <= 20; ++n) CHECK(ball(*half, o, n).size() == static_cast<std::size_t>(n + 1));
}

TEST_CASE("subgroup Schreier graphs by folding") {
  auto xa = make_subgroup_schreier(2, {"a"});
  const auto o = xa->root();
  CHECK(xa->neighbor(o, xa->alphabet().find("a")) == o);
  CHECK(xa->neighbor(o, xa->alphabet().find("A")) == o);
  CHECK(xa->neighbor(o, xa->alphabet().find("b")) != o);

  auto x2 = make_subgroup_schreier(2, {"aa", "b"});
  const auto o2 = x2->root();
  CHECK(x2->neighbor(o2, x2->alphabet().find("b")) == o2);
  const auto mid = x2->neighbor(o2, x2->alphabet().find("a"));
  CHECK(mid != o2);
  CHECK(x2->neighbor(mid, x2->alphabet().find("a")) == o2);
  CHECK(x2->neighbor(o2, x2->alphabet().find("A")) == mid);

  // Conjugated generator folds to a b-loop at the vertex Ka.
  auto xc = make_subgroup_schreier(2, {"abA"});
  const auto ka = follow(*xc, xc->root(), "a");
  CHECK(xc->neighbor(ka, xc->alphabet().find("b")) == ka);

  CHECK_THROWS_AS(make_subgroup_schreier(2, {"a", "b"}), ValidationError);
  // Index 2 in Z2*Z2 is finite as well.
  CHECK_THROWS_AS(make_subgroup_schreier(
                      {GroupFactor::cyclic(2, {"r"}), GroupFactor::cyclic(2, {"s"})}, {"rs"}),
                  ValidationError);
}

TEST_CASE("trivial subgroup gives the Cayley graph") {
  auto f2 = make_free_group(2);
  auto trivial = make_subgroup_schreier(2, {});
  CHECK(ball_signature(*f2, f2->root(), 8) == ball_signature(*trivial, trivial->root(), 8));
  auto t3 = testing::z2_cubed();
  auto t3k = make_subgroup_schreier(testing::z2_cubed_factors(), {});
  CHECK(ball_signature(*t3, t3->root(), 8) == ball_signature(*t3k, t3k->root(), 8));
}

TEST_CASE("Z2*Z2*Z2 modulo <r> has a loop at the root") {
  auto x = testing::z2_cubed_mod_r();
  const auto o = x->root();
  CHECK(x->neighbor(o, x->alphabet().find("r")) == o);
  CHECK(ball(*x, o, 2).size() == 1 + 2 + 4);
}

TEST_CASE("cone descriptions unroll to the expected graphs") {
  auto described = testing::dinf_half_line_description();
  auto half = testing::dinf_half_line();
  CHECK(ball_signature(*described, described->root(), 20) == ball_signature(*half, half->root(), 20));

  auto tree = testing::z2_cubed_description();
  auto t3 = testing::z2_cubed();
  CHECK(ball_signature(*tree, tree->root(), 10) == ball_signature(*t3, t3->root(), 10));

  // A single two-vertex type piece chained to itself is the same ray.
  ConeDescriptionSpec spec;
  spec.alphabet = {{"r", "r"}, {"s", "s"}};
  spec.root = {"root", 1, {{0, "r", 0}}, {{"P", {{0, "s", 0}}}}};
  spec.types = {{"P", 2, {{0, "r", 1}}, {{"P", {{1, "s", 0}}}}}};
  auto ray = make_cone_description(spec);
  CHECK(ball_signature(*ray, ray->root(), 20) == ball_signature(*half, half->root(), 20));
}

TEST_CASE("cone description validation") {
  ConeDescriptionSpec closed;
  closed.alphabet = {{"r", "r"}, {"s", "s"}};
  closed.root = {"root", 1, {{0, "r", 0}, {0, "s", 0}}, {}};
  CHECK_THROWS_AS(make_cone_description(closed), ValidationError);

  // Type A is attached once with s and once with r: inconsistent parents.
  ConeDescriptionSpec bad;
  bad.alphabet = {{"r", "r"}, {"s", "s"}};
  bad.root = {"root", 1, {{0, "r", 0}}, {{"A", {{0, "s", 0}}}}};
  bad.types = {{"A", 1, {}, {{"A", {{0, "r", 0}}}}}};
  try {
    make_cone_description(bad);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("inconsistent attachment") != std::string::npos);
    CHECK((what.find("'r'") != std::string::npos || what.find("'s'") != std::string::npos));
  }
}

TEST_CASE("oracle invariants on radius-10 balls") {
  for (const auto& g : testing::shipped_graphs()) {
    const int radius = g.oracle->alphabet().size() >= 4 ? 8 : 10;
    INFO(g.name);
    CHECK(check_oracle_invariants(*g.oracle, radius).empty());
  }
}

TEST_CASE("balls are nested and distances are BFS distances") {
  auto x = testing::z2_cubed_mod_r();
  auto big = ball(*x, x->root(), 6);
  for (int n = 0; n < 6; ++n) {
    auto small = ball(*x, x->root(), n);
    for (std::size_t i = 0; i < small.size(); ++i) {
      auto j = big.find(small.vertices[i]);
      REQUIRE(j.has_value());
      CHECK(big.distance[*j] == small.distance[i]);
    }
  }
  for (std::size_t i = 0; i < big.size(); i += 7) {
    CHECK(graph_distance(*x, x->root(), big.vertices[i], 10).value() == big.distance[i]);
  }
}

TEST_CASE("ball DOT export lists each undirected edge once") {
  auto half = testing::dinf_half_line();
  const std::string dot = ball_to_dot(*half, ball(*half, half->root(), 2));
  CHECK(dot.find("graph ball") == 0);
  // r-loop at 0, s: 0-1, r: 1-2.
  std::size_t edges = 0;
  for (std::size_t pos = dot.find(" -- "); pos != std::string::npos; pos = dot.find(" -- ", pos + 1))
    ++edges;
  CHECK(edges == 3);
}
