#include <doctest.h>

#include <cmath>

#include "cfwalk/errors.hpp"
#include "cfwalk/genfun.hpp"
#include "test_support.hpp"

using namespace cfwalk;

namespace {

struct Sys {
  OraclePtr graph;
  ConeTypeTable table;
  Grammar grammar;
  GenFunSystem sys;
};

Sys make(OraclePtr g, StepDistribution mu = {}) {
  Sys s{g, assign_types(*g, g->root()), {}, {}};
  if (mu.weights.empty()) mu = StepDistribution::uniform(g->alphabet());
  s.grammar = build_grammar(*g, s.table, g->root());
  s.sys = make_system(s.grammar, mu);
  return s;
}

StepDistribution heavy_loops() {
  return StepDistribution::from_names(make_free_group(2)->alphabet(),
                                      {{"a", 0.45}, {"A", 0.45}, {"b", 0.05}, {"B", 0.05}});
}

// Drift towards a and b; the root keeps half its mass on loops.
StepDistribution drifted() {
  return StepDistribution::from_names(make_free_group(2)->alphabet(),
                                      {{"a", 0.45}, {"b", 0.45}, {"A", 0.05}, {"B", 0.05}});
}

// Green function of the ray 1, 2, ..., L at vertex 1 for the walk that
// steps left or right with probability 1/2 and is killed at 0 and L + 1.
double ray_green(int L) {
  // Thomas algorithm for (I - P) g = e_1, P tridiagonal with 1/2 off the diagonal.
  std::vector<double> c(L), d(L);
  c[0] = -0.5;
  d[0] = 1.0;
  for (int i = 1; i < L; ++i) {
    const double m = 1.0 + 0.5 * c[i - 1];
    c[i] = -0.5 / m;
    d[i] = (0.0 + 0.5 * d[i - 1]) / m;
  }
  std::vector<double> g(L);
  g[L - 1] = d[L - 1];
  for (int i = L - 2; i >= 0; --i) g[i] = d[i] - c[i] * g[i + 1];
  return g[0];
}

// First return to the top of a depth-L truncated cone of the 4-regular tree.
double tree_cone_green(double z, int L) {
  double u = 0.0;
  for (int k = 0; k < L; ++k) u = 3.0 * z * z / 16.0 / (1.0 - u);
  return 1.0 / (1.0 - u);
}

// Ratio-test estimate of the radius from c(n) ~ C R^-n n^-3/2 on even n,
// with Richardson extrapolation in 1/n.
double ratio_radius(const std::vector<double>& log_c, int N) {
  auto est = [&](int n) { return std::exp(-(log_c[n] - log_c[n - 2]) / 2.0); };
  const int n1 = N / 8 * 2, n2 = N / 4 * 2, n3 = N / 2 * 2;
  // r(n) = R + a / n + b / n^2: solve from three samples.
  const double x1 = 1.0 / n1, x2 = 1.0 / n2, x3 = 1.0 / n3;
  const double y1 = est(n1), y2 = est(n2), y3 = est(n3);
  const double l1 = x2 * x3 / ((x1 - x2) * (x1 - x3));
  const double l2 = x1 * x3 / ((x2 - x1) * (x2 - x3));
  const double l3 = x1 * x2 / ((x3 - x1) * (x3 - x2));
  return l1 * y1 + l2 * y2 + l3 * y3;
}

}  // namespace

TEST_CASE("essential values at z = 0 are the epsilon flags") {
  auto s = make(make_free_group(2));
  auto e = eval_essential(s.sys, 0.0);
  REQUIRE(e.converged);
  for (int t : s.sys.essential) CHECK(e.y[t] == s.sys.delta[t]);
}

TEST_CASE("essential values at z = 1") {
  const double ray = ray_green(1'000'000);
  CHECK(ray == doctest::Approx(2.0).epsilon(1e-5));
  auto half = make(testing::dinf_half_line());
  auto e = eval_essential(half.sys, 1.0);
  REQUIRE(e.converged);
  for (int t : half.sys.essential) CHECK(std::abs(e.y[t] - 2.0) < 1e-6);

  auto f2 = make(make_free_group(2));
  auto g = eval_essential(f2.sys, 1.0);
  REQUIRE(g.converged);
  const double cone = tree_cone_green(1.0, 200);
  CHECK(cone == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  for (int t : f2.sys.essential) CHECK(g.y[t] == doctest::Approx(cone).epsilon(1e-13));
}

TEST_CASE("Newton and plain iteration agree below R") {
  for (const auto& ng : testing::shipped_graphs()) {
    INFO(ng.name);
    auto s = make(ng.oracle);
    const double z = 0.9;
    auto newton = eval_essential(s.sys, z);
    EvalOptions opt;
    opt.kleene = true;
    auto kleene = eval_essential(s.sys, z, opt);
    REQUIRE(newton.converged);
    REQUIRE(kleene.converged);
    for (int t : s.sys.essential) CHECK(newton.y[t] == doctest::Approx(kleene.y[t]).epsilon(1e-12));
  }
}

TEST_CASE("essential radius") {
  auto half = make(testing::dinf_half_line());
  auto rh = find_R(half.sys);
  CHECK(std::abs(rh.R - 1.0) < 1e-8);
  CHECK(rh.refined);
  CHECK(rh.rho_at_R == doctest::Approx(1.0).epsilon(1e-7));

  auto f2 = make(make_free_group(2));
  auto rf = find_R(f2.sys);
  CHECK(std::abs(rf.R - 2.0 / std::sqrt(3.0)) < 1e-9);
  auto series = series_all(f2.grammar, StepDistribution::uniform(f2.graph->alphabet()), 5000, 1.15);
  std::vector<double> logs(5001);
  const int ess = f2.sys.essential.front();
  for (int n = 0; n <= 5000; ++n) logs[n] = series.log_value(ess, n);
  const double oracle = ratio_radius(logs, 5000);
  CHECK(std::abs(oracle - 2.0 / std::sqrt(3.0)) < 1e-6);
  CHECK(std::abs(rf.R - oracle) < 1e-6);
  for (int t : f2.sys.essential) CHECK(rf.f_at_R[t] == doctest::Approx(2.0).epsilon(1e-9));

  auto t3 = make(testing::z2_cubed());
  auto rt = find_R(t3.sys);
  CHECK(std::abs(rt.R - 3.0 / (2.0 * std::sqrt(2.0))) < 1e-9);
  auto st = series_all(t3.grammar, StepDistribution::uniform(t3.graph->alphabet()), 5000, 1.06);
  for (int n = 0; n <= 5000; ++n) logs[n] = st.log_value(t3.sys.essential.front(), n);
  CHECK(std::abs(ratio_radius(logs, 5000) - rt.R) < 1e-6);

  // Z has two independent essential blocks, both critical.
  auto z = make(make_free_group(1));
  auto rz = find_R(z.sys);
  CHECK(std::abs(rz.R - 1.0) < 1e-8);
  for (int t : z.sys.essential) CHECK(rz.f_at_R[t] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("Q matrix") {
  auto half = make(testing::dinf_half_line());
  CHECK(build_Q(half.sys, 0.0, eval_essential(half.sys, 0.0).y).isZero());
  std::vector<double> f(half.sys.size, 2.0);
  auto q = build_Q(half.sys, 1.0, f);
  REQUIRE(q.rows() == 1);
  CHECK(q(0, 0) == 1.0);

  // Four bridges through cones with restricted Green function 4/3.
  auto f2 = make(make_free_group(2));
  auto q2 = build_Q(f2.sys, 1.0, eval_essential(f2.sys, 1.0).y);
  CHECK(q2(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  // and G(o, o | 1) = 1 / (1 - q) is the tree's 3/2.
  CHECK(green_functions(f2.sys, 1.0)[0] == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("Perron-Frobenius eigen data") {
  Eigen::MatrixXd one(1, 1);
  one << 0.375;
  auto p1 = pf_eigen(one);
  CHECK(p1.lambda == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(p1.v(0) == doctest::Approx(1.0));
  CHECK(p1.w(0) == doctest::Approx(1.0));

  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  auto p2 = pf_eigen(swap);
  CHECK(p2.lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p2.v(0) == doctest::Approx(0.5));
  CHECK(p2.v(1) == doctest::Approx(0.5));
  CHECK(p2.w(0) == doctest::Approx(1.0));
  CHECK(p2.w(1) == doctest::Approx(1.0));

  Eigen::MatrixXd m(3, 3);
  m << 0.1, 2, 0, 0, 0.3, 1, 0.5, 0, 0.2;
  auto p3 = pf_eigen(m);
  CHECK(((m * p3.w) - p3.lambda * p3.w).norm() < 1e-10);
  CHECK(((p3.v.transpose() * m) - p3.lambda * p3.v.transpose()).norm() < 1e-10);
  CHECK(p3.v.sum() == doctest::Approx(1.0));
  CHECK(p3.v.dot(p3.w) == doctest::Approx(1.0));
  CHECK(p3.lambda == doctest::Approx(spectral_radius(m)).epsilon(1e-10));

  Eigen::MatrixXd red(2, 2);
  red << 1, 1, 0, 1;
  CHECK_THROWS_AS(pf_eigen(red), SpectralError);
  try {
    pf_eigen(red);
  } catch (const SpectralError& e) {
    CHECK(std::string(e.what()).find("zero block") != std::string::npos);
  }
}

TEST_CASE("lambda'(z) matches v^t Q'(z) w") {
  auto half = make(testing::dinf_half_line());
  CHECK(lambda_prime_check(half.sys, 0.5) <= 1e-5);
  auto f2 = make(make_free_group(2));
  CHECK(lambda_prime_check(f2.sys, 0.8) <= 1e-5);
}

TEST_CASE("classification of the three cases") {
  auto half = make(testing::dinf_half_line());
  auto ch = classify(half.sys);
  CHECK(ch.case_tag == 'b');
  CHECK(std::abs(ch.R_mu - 1.0) < 1e-6);
  CHECK(std::abs(ch.lambda_at_R - 1.0) < 1e-9);

  auto f2 = make(make_free_group(2));
  auto cf = classify(f2.sys);
  CHECK(cf.case_tag == 'c');
  CHECK(std::abs(cf.R_mu - 2.0 / std::sqrt(3.0)) < 1e-6);
  CHECK(cf.lambda_at_R == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  auto xa = make(make_subgroup_schreier(2, {"a"}), drifted());
  auto ca = classify(xa.sys);
  CHECK(ca.case_tag == 'a');
  CHECK(ca.R_mu < ca.R - 1e-4);
  CHECK(lambda_at(xa.sys, ca.R_mu) == doctest::Approx(1.0).epsilon(1e-10));
  // A simple pole: consecutive ratios converge geometrically to 1 / R_mu.
  const auto c = series_coefficients(xa.grammar, 0, drifted(), 600);
  CHECK(std::abs(c[599] / c[600] - ca.R_mu) < 1e-9);

  // Symmetric heavy loops do not produce a pole: G(R) stays finite.
  auto xh = make(make_subgroup_schreier(2, {"a"}), heavy_loops());
  auto chl = classify(xh.sys);
  CHECK(chl.case_tag == 'c');
  CHECK(chl.lambda_at_R < 0.99);
  auto sh = series_all(xh.grammar, heavy_loops(), 8000, chl.R);
  double partial = 0.0;
  for (double v : sh.scaled[0]) partial += v;
  const double g_at_R = green_functions(xh.sys, chl.R * (1 - 1e-12))[0];
  CHECK(partial < g_at_R);
  CHECK(partial > 0.9 * g_at_R);

  auto xu = make(make_subgroup_schreier(2, {"a"}));
  auto cu = classify(xu.sys);
  CHECK(cu.case_tag == 'c');
  CHECK(cu.lambda_at_R == doctest::Approx(1.0 / std::sqrt(3.0) + 1.0 / 3.0).epsilon(1e-9));

  auto xr = make(testing::z2_cubed_mod_r());
  auto cr = classify(xr.sys);
  CHECK(cr.case_tag == 'c');
  CHECK(cr.lambda_at_R == doctest::Approx(cr.R / 3.0 + 0.5).epsilon(1e-9));

  auto z = make(make_free_group(1));
  ClassifyOptions opt;
  opt.irreducible = false;
  auto cz = classify(z.sys, opt);
  CHECK(cz.case_tag == 'b');
  CHECK(cz.caveats.size() == 2);
  const auto js = classification_json(cz);
  CHECK(js.find("\"case\": \"b\"") != std::string::npos);
}

TEST_CASE("monotone values and an up-set of divergence") {
  for (const auto& ng : testing::shipped_graphs()) {
    INFO(ng.name);
    auto s = make(ng.oracle);
    const double R = find_R(s.sys).R;
    std::vector<double> prev(s.sys.size, 0.0);
    for (int k = 0; k <= 40; ++k) {
      const double z = R * k / 40.0 * (1 - 1e-9);
      auto e = eval_essential(s.sys, z);
      REQUIRE(e.converged);
      for (int t : s.sys.essential) CHECK(e.y[t] >= prev[t] - 1e-12);
      prev = e.y;
    }
    for (int k = 1; k <= 10; ++k) CHECK_FALSE(eval_essential(s.sys, R * (1 + 0.01 * k)).converged);
  }
}

TEST_CASE("lambda increases and Q stays irreducible") {
  std::vector<std::pair<OraclePtr, StepDistribution>> cases;
  for (const auto& ng : testing::shipped_graphs()) cases.emplace_back(ng.oracle, StepDistribution{});
  cases.emplace_back(make_subgroup_schreier(2, {"a"}), drifted());
  for (const auto& [g, mu] : cases) {
    auto s = make(g, mu);
    const double R = find_R(s.sys).R;
    double prev = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double z = R * k / 50.0 * (1 - 1e-9);
      const double l = lambda_at(s.sys, z);
      CHECK(l > prev);
      prev = l;
    }
    for (int k = 1; k <= 10; ++k) {
      auto e = eval_essential(s.sys, R * k / 10.0 * (1 - 1e-9));
      CHECK(is_irreducible(build_Q(s.sys, R * k / 10.0, e.y)));
    }
  }
}

TEST_CASE("Green functions agree with the coefficient series") {
  std::vector<std::pair<OraclePtr, StepDistribution>> cases;
  for (const auto& ng : testing::shipped_graphs()) cases.emplace_back(ng.oracle, StepDistribution{});
  cases.emplace_back(make_subgroup_schreier(2, {"a"}), drifted());
  for (const auto& [g, mu] : cases) {
    auto s = make(g, mu);
    const auto m = mu.weights.empty() ? StepDistribution::uniform(g->alphabet()) : mu;
    const auto c = classify(s.sys);
    const double z = 0.9 * c.R_mu;
    const auto green = green_functions(s.sys, z);
    auto series = series_all(s.grammar, m, 4000, z);
    for (int t = 0; t < s.sys.root_count; ++t) {
      double sum = 0.0;
      for (int n = 0; n <= 4000; ++n) sum += series.scaled[t][n];
      CHECK(sum == doctest::Approx(green[t]).epsilon(1e-8));
    }
  }
}

TEST_CASE("case a has a simple pole at R_mu") {
  auto s = make(make_subgroup_schreier(2, {"a"}), drifted());
  auto c = classify(s.sys);
  REQUIRE(c.case_tag == 'a');
  std::vector<double> residue;
  for (int k = 3; k <= 7; ++k) {
    const double z = c.R_mu * (1 - std::pow(10.0, -k));
    residue.push_back((1 - lambda_at(s.sys, z)) * green_functions(s.sys, z)[0]);
  }
  for (double r : residue) CHECK(r > 0);
  CHECK(std::abs(residue[4] - residue[3]) < 1e-3 * residue[4]);
  CHECK(std::abs(residue[3] - residue[2]) < 1e-2 * residue[3]);
}
