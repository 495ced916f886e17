#include "cfwalk/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cfwalk/errors.hpp"
#include "cfwalk/genfun.hpp"
#include "cfwalk/grammar.hpp"
#include "cfwalk/groups.hpp"
#include "cfwalk/validator.hpp"

namespace cfwalk {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigurationError("cli-report", what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) bad("unknown key '" + k + "' in " + where);
}

template <typename T>
T get(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad("'" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

std::vector<PieceEdgeSpec> edges_from(const json& j, const std::string& where) {
  std::vector<PieceEdgeSpec> out;
  if (!j.is_array()) bad(where + " must be an array of [from, label, to]");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_string() ||
        !e[2].is_number_integer())
      bad(where + " entries must be [from, label, to]");
    out.push_back({e[0].get<int>(), e[1].get<std::string>(), e[2].get<int>()});
  }
  return out;
}

PieceSpec piece_from(const json& j, const std::string& where) {
  only_keys(j, where, {"name", "vertices", "edges", "children"});
  PieceSpec p;
  p.name = get<std::string>(j, "name", "", where);
  p.vertices = get<int>(j, "vertices", 0, where);
  if (j.contains("edges")) p.edges = edges_from(j["edges"], where + ".edges");
  if (j.contains("children")) {
    if (!j["children"].is_array()) bad(where + ".children must be an array");
    for (const auto& c : j["children"]) {
      only_keys(c, where + ".children[]", {"type", "attach"});
      ChildSpec cs;
      cs.type = get<std::string>(c, "type", "", where + ".children[]");
      cs.attach = edges_from(c.value("attach", json::array()), where + ".children[].attach");
      p.children.push_back(std::move(cs));
    }
  }
  return p;
}

json piece_to(const PieceSpec& p) {
  json edges = json::array(), children = json::array();
  for (const auto& e : p.edges) edges.push_back({e.from, e.label, e.to});
  for (const auto& c : p.children) {
    json attach = json::array();
    for (const auto& e : c.attach) attach.push_back({e.from, e.label, e.to});
    children.push_back({{"type", c.type}, {"attach", attach}});
  }
  return {{"name", p.name}, {"vertices", p.vertices}, {"edges", edges}, {"children", children}};
}

GraphConfig graph_from(const json& j) {
  only_keys(j, "graph", {"family", "rank", "factors", "subgroup", "alphabet", "root", "types"});
  GraphConfig g;
  g.family = get<std::string>(j, "family", "", "graph");
  g.rank = get<int>(j, "rank", 0, "graph");
  if (j.contains("factors")) {
    if (!j["factors"].is_array()) bad("graph.factors must be an array");
    for (const auto& f : j["factors"]) {
      only_keys(f, "graph.factors[]", {"order", "names"});
      g.factors.push_back({get<int>(f, "order", 0, "graph.factors[]"),
                           get<std::vector<std::string>>(f, "names", {}, "graph.factors[]")});
    }
  }
  g.subgroup = get<std::vector<std::string>>(j, "subgroup", {}, "graph");
  if (g.family == "cone_description") {
    g.description.alphabet =
        get<std::vector<std::pair<std::string, std::string>>>(j, "alphabet", {}, "graph");
    if (!j.contains("root")) bad("cone_description needs a root piece");
    g.description.root = piece_from(j["root"], "graph.root");
    if (j.contains("types")) {
      if (!j["types"].is_array()) bad("graph.types must be an array");
      for (const auto& t : j["types"]) g.description.types.push_back(piece_from(t, "graph.types[]"));
    }
  }
  return g;
}

json graph_to(const GraphConfig& g) {
  json j{{"family", g.family}};
  if (g.family == "free_group" || (g.family == "schreier" && g.factors.empty())) j["rank"] = g.rank;
  if (!g.factors.empty()) {
    json fs = json::array();
    for (const auto& f : g.factors) fs.push_back({{"order", f.order}, {"names", f.names}});
    j["factors"] = fs;
  }
  if (g.family == "schreier") j["subgroup"] = g.subgroup;
  if (g.family == "cone_description") {
    j["alphabet"] = g.description.alphabet;
    j["root"] = piece_to(g.description.root);
    json ts = json::array();
    for (const auto& t : g.description.types) ts.push_back(piece_to(t));
    j["types"] = ts;
  }
  return j;
}

std::vector<GroupFactor> factors_of(const GraphConfig& g) {
  std::vector<GroupFactor> out;
  for (const auto& f : g.factors) {
    if (f.order == 0) {
      if (f.names.size() != 2) bad("an infinite cyclic factor needs [generator, inverse] names");
      out.push_back(GroupFactor::infinite_cyclic(f.names[0], f.names[1]));
    } else {
      if (f.order < 2) bad("finite factor order must be >= 2");
      out.push_back(GroupFactor::cyclic(f.order, f.names));
    }
  }
  return out;
}

json config_json(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["graph"] = graph_to(c.graph);
  if (c.mu.empty())
    j["mu"] = "uniform";
  else
    j["mu"] = c.mu;
  j["origin"] = c.origin;
  j["target"] = c.target;
  j["types"] = {{"root_radius", c.types.root_radius}, {"first_depth", c.types.first_depth},
                {"depth_step", c.types.depth_step},   {"max_radius", c.types.max_radius},
                {"vertex_cap", c.types.vertex_cap},   {"max_types", c.types.max_types}};
  j["tolerances"] = {{"classify", c.classify_tol}, {"splice", c.splice_tol}, {"alpha", c.alpha_tol},
                     {"rmu", c.rmu_tol},           {"lambda_prime", c.lambda_prime_tol}};
  j["series"] = {{"n", c.series_n}, {"n_ball", c.n_ball}};
  j["ball_radius"] = c.ball_radius;
  j["output_dir"] = c.output_dir;
  return j;
}

// Everything the pipeline derives from a config, computed once.
struct Pipeline {
  RunConfig config;
  OraclePtr graph;
  StepDistribution mu;
  VertexKey origin;
  VertexKey target;
  ConeTypeTable table;
  TypeGraph types;
  IrreducibilityReport irreducibility;
  Grammar grammar;
  DependencyDigraph deps;
  GenFunSystem system;

  explicit Pipeline(const RunConfig& c) : config(c) {
    graph = build_graph(c.graph);
    mu = build_mu(*graph, c);
    origin = follow(*graph, graph->root(), c.origin);
    target = follow(*graph, graph->root(), c.target);
    table = assign_types(*graph, graph->root(), c.types);
    const auto& root = table.pieces[0].vertices;
    for (const auto* v : {&origin, &target})
      if (std::find(root.begin(), root.end(), *v) == root.end())
        bad("vertex " + graph->format_key(*v) + " is outside the root piece; raise types.root_radius");
    types = type_graph(table);
    irreducibility = check_irreducible(types);
    grammar = build_grammar(*graph, table, target);
    deps = dependency_analysis(grammar);
    system = make_system(grammar, mu);
  }

  Classification classification() const {
    ClassifyOptions opt;
    opt.tol = config.classify_tol;
    opt.irreducible = types.strongly_connected;
    return classify(system, opt);
  }
};

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) body(i);
    });
  for (auto& t : pool) t.join();
}

json grammar_summary(const Pipeline& p) {
  std::vector<int> per_piece(p.table.pieces.size(), 0);
  for (const auto& v : p.grammar.variables) ++per_piece[v.piece];
  return {{"variables", p.grammar.variables.size()},
          {"V0", p.grammar.root_count()},
          {"variables_per_piece", per_piece},
          {"productions", p.grammar.productions.size()},
          {"components", p.deps.components.size()},
          {"essential_components", p.deps.essential.size()},
          {"two_components", p.deps.two_components},
          {"all_reachable_from_root", p.deps.all_reachable_from_root}};
}

json checks_json(const std::vector<CheckResult>& checks) {
  json out = json::array();
  for (const auto& c : checks)
    out.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"value", c.value},
                   {"tolerance", c.tolerance},
                   {"detail", c.detail}});
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<CheckResult> structural_checks(const Pipeline& p, const PeriodInfo& per,
                                           WalkSeries* series_out, const Classification* cls) {
  std::vector<CheckResult> checks;
  const auto violations = check_oracle_invariants(*p.graph, p.config.ball_radius);
  checks.push_back({"oracle invariants", violations.empty(), static_cast<double>(violations.size()), 0,
                    violations.empty() ? "deterministic and symmetric on B(o, " +
                                             std::to_string(p.config.ball_radius) + ")"
                                       : violations.front()});
  const auto succ = check_successor_counts(*p.graph, p.table, 3);
  checks.push_back({"successor counts", succ.empty(), static_cast<double>(succ.size()), 0,
                    succ.empty() ? "3 generations agree with a(i,j)" : succ.front()});

  SeriesOptions so;
  so.n_ball = p.config.n_ball;
  so.splice_tol = p.config.splice_tol;
  SpliceCheck splice;
  const double scale = cls ? cls->R_mu : 1.0;
  const int N = series_out ? p.config.series_n : std::max(200, p.config.n_ball);
  auto series = walk_series(*p.graph, p.table, p.grammar, p.mu, p.origin, N, scale, so, &splice);
  checks.push_back({"exactness splice", splice.passed, splice.max_rel_error, p.config.splice_tol,
                    "grammar DP against ball powers for n <= " + std::to_string(splice.n_max)});
  const int dist = graph_distance(*p.graph, p.origin, p.target, 1000).value_or(0);
  const auto par = parity_violations(series, dist, per.d, 200);
  checks.push_back({"parity vanishing", par.empty(), static_cast<double>(par.size()), 0,
                    "n <= 200, d = " + std::to_string(per.d) + ", d(x,y) = " + std::to_string(dist)});
  if (series_out) *series_out = std::move(series);
  return checks;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j, "config", {"name", "graph", "mu", "origin", "target", "types", "tolerances", "series",
                          "ball_radius", "output_dir"});
  RunConfig c;
  c.name = get<std::string>(j, "name", "run", "config");
  if (!j.contains("graph")) bad("config needs a graph section");
  c.graph = graph_from(j["graph"]);
  if (j.contains("mu")) {
    const auto& m = j["mu"];
    if (m.is_string()) {
      if (m.get<std::string>() != "uniform") bad("mu must be \"uniform\" or an object of weights");
    } else if (m.is_object()) {
      for (const auto& [k, v] : m.items()) {
        if (!v.is_number()) bad("weight of '" + k + "' must be a number");
        c.mu[k] = v.get<double>();
      }
    } else {
      bad("mu must be \"uniform\" or an object of weights");
    }
  }
  c.origin = get<std::string>(j, "origin", "", "config");
  c.target = get<std::string>(j, "target", "", "config");
  if (j.contains("types")) {
    const auto& t = j["types"];
    only_keys(t, "types", {"root_radius", "first_depth", "depth_step", "max_radius", "vertex_cap", "max_types"});
    c.types.root_radius = get<int>(t, "root_radius", c.types.root_radius, "types");
    c.types.first_depth = get<int>(t, "first_depth", c.types.first_depth, "types");
    c.types.depth_step = get<int>(t, "depth_step", c.types.depth_step, "types");
    c.types.max_radius = get<int>(t, "max_radius", c.types.max_radius, "types");
    c.types.vertex_cap = get<std::size_t>(t, "vertex_cap", c.types.vertex_cap, "types");
    c.types.max_types = get<int>(t, "max_types", c.types.max_types, "types");
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    only_keys(t, "tolerances", {"classify", "splice", "alpha", "rmu", "lambda_prime"});
    c.classify_tol = get<double>(t, "classify", c.classify_tol, "tolerances");
    c.splice_tol = get<double>(t, "splice", c.splice_tol, "tolerances");
    c.alpha_tol = get<double>(t, "alpha", c.alpha_tol, "tolerances");
    c.rmu_tol = get<double>(t, "rmu", c.rmu_tol, "tolerances");
    c.lambda_prime_tol = get<double>(t, "lambda_prime", c.lambda_prime_tol, "tolerances");
  }
  if (j.contains("series")) {
    const auto& s = j["series"];
    only_keys(s, "series", {"n", "n_ball"});
    c.series_n = get<int>(s, "n", c.series_n, "series");
    c.n_ball = get<int>(s, "n_ball", c.n_ball, "series");
  }
  c.ball_radius = get<int>(j, "ball_radius", c.ball_radius, "config");
  c.output_dir = get<std::string>(j, "output_dir", "out/" + c.name, "config");

  for (double t : {c.classify_tol, c.splice_tol, c.alpha_tol, c.rmu_tol, c.lambda_prime_tol})
    if (!(t > 0)) bad("tolerances must be positive");
  if (c.series_n < 200) bad("series.n must be >= 200 for the fits");
  if (c.n_ball < 0 || c.n_ball > c.series_n) bad("series.n_ball must lie in [0, series.n]");
  if (c.ball_radius < 0) bad("ball_radius must be >= 0");
  if (c.types.root_radius < 0 || c.types.first_depth < 1 || c.types.depth_step < 1 ||
      c.types.max_radius < c.types.first_depth)
    bad("types: need root_radius >= 0, first_depth >= 1, depth_step >= 1, max_radius >= first_depth");

  // Building the graph and the weights catches unknown families, bad
  // subgroup words and label-incomplete weights up front.
  try {
    auto g = build_graph(c.graph);
    build_mu(*g, c);
    follow(*g, g->root(), c.origin);
    follow(*g, g->root(), c.target);
  } catch (const ConfigurationError&) {
    throw;
  } catch (const Error& e) {
    bad(e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_canonical(const RunConfig& config) { return config_json(config).dump(); }

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config_canonical(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

OraclePtr build_graph(const GraphConfig& g) {
  if (g.family == "free_group") return make_free_group(g.rank);
  if (g.family == "free_product") return make_free_product(factors_of(g));
  if (g.family == "schreier") {
    if (g.factors.empty()) return make_subgroup_schreier(g.rank, g.subgroup);
    return make_subgroup_schreier(factors_of(g), g.subgroup);
  }
  if (g.family == "cone_description") return make_cone_description(g.description);
  bad("unknown graph family '" + g.family + "'");
}

StepDistribution build_mu(const GraphOracle& graph, const RunConfig& config) {
  try {
    auto mu = config.mu.empty() ? StepDistribution::uniform(graph.alphabet())
                                : StepDistribution::from_names(graph.alphabet(), config.mu);
    validate_step_distribution(graph.alphabet(), mu);
    return mu;
  } catch (const ConfigurationError& e) {
    bad(e.what());
  }
}

RunReport run_validate(const RunConfig& config) {
  const Pipeline p(config);
  RunReport r;
  r.checks = structural_checks(p, periods(*p.graph, p.table), nullptr, nullptr);
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["mode"] = "validate";
  j["config_hash"] = config_hash(config);
  j["config"] = config_json(config);
  j["checks"] = checks_json(r.checks);
  r.exit_code = std::all_of(r.checks.begin(), r.checks.end(), [](const auto& c) { return c.passed; }) ? 0 : 1;
  j["exit_code"] = r.exit_code;
  r.json = j.dump(2) + "\n";
  std::ostringstream s;
  for (const auto& c : r.checks)
    s << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << fmt(c.value) << " (" << c.detail << ")\n";
  r.summary = s.str();
  return r;
}

RunReport run_analyze(const RunConfig& config) {
  const Pipeline p(config);
  RunReport r;
  const auto cls = p.classification();
  const auto per = periods(*p.graph, p.table);
  WalkSeries series;
  r.checks = structural_checks(p, per, &series, &cls);
  const auto fit = fit_asymptotics(series, cls, per);

  // Spectral identities on interior grid points.
  std::vector<double> lp(5);
  parallel_for(5, [&](int k) { lp[k] = lambda_prime_check(p.system, cls.R_mu * (k + 1) / 6.0); });
  const double lp_max = *std::max_element(lp.begin(), lp.end());
  r.checks.push_back({"lambda' identity", lp_max <= config.lambda_prime_tol, lp_max, config.lambda_prime_tol,
                      "max over z = k R_mu / 6, k = 1..5"});
  std::vector<int> irr(10);
  parallel_for(10, [&](int k) {
    const double z = cls.R * (k + 1) / 10.0 * (1 - 1e-9);
    irr[k] = is_irreducible(build_Q(p.system, z, eval_essential(p.system, z).y));
  });
  const int irr_ok = static_cast<int>(std::count(irr.begin(), irr.end(), 1));
  r.checks.push_back({"Q irreducible", irr_ok == 10, static_cast<double>(irr_ok), 10,
                      "grid points z = k R / 10 with irreducible Q(z)"});
  const double rmu_err = std::abs(fit.R_mu_hat - cls.R_mu);
  r.checks.push_back({"R_mu cross-validation", rmu_err <= config.rmu_tol, rmu_err, config.rmu_tol,
                      "series estimate " + fmt(fit.R_mu_hat) + " vs classifier " + fmt(cls.R_mu)});
  const double a_err = std::abs(fit.alpha - cls.exponent());
  r.checks.push_back({"exponent consistency", a_err <= config.alpha_tol, a_err, config.alpha_tol,
                      "fitted " + fmt(fit.alpha) + " vs case " + std::string(1, cls.case_tag) + " exponent " +
                          fmt(cls.exponent())});
  if (fit.split && cls.case_tag == 'a')
    r.checks.push_back({"no oscillation at a pole", !fit.oscillation, fit.c_bar, 3 * fit.c_bar_se,
                        "even/odd split of the constant"});
  if (fit.oscillation)
    r.checks.push_back({"oscillation bound", std::abs(fit.c_bar) + 3 * fit.c_bar_se < fit.c, std::abs(fit.c_bar),
                        fit.c, "|c_bar| < c beyond 3 standard errors"});

  r.warnings = cls.caveats;
  if (!p.deps.two_components)
    r.warnings.push_back("dependency digraph has more than two strong components");

  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["mode"] = "analyze";
  j["config_hash"] = config_hash(config);
  j["config"] = config_json(config);
  j["graph"] = {{"kind", p.graph->kind()}, {"alphabet", p.graph->alphabet().names()}};
  j["type_table"] = json::parse(type_table_json(*p.graph, p.table, p.types));
  j["irreducibility"] = {{"irreducible", p.irreducibility.irreducible}, {"summary", p.irreducibility.summary}};
  j["grammar"] = grammar_summary(p);
  j["classification"] = json::parse(classification_json(cls));
  j["periods"] = json::parse(periods_json(per));
  j["fit"] = json::parse(fit_json(fit));
  j["series"] = {{"n", series.N()},
                 {"scale", series.scale},
                 {"provenance",
                  {{{"from", 0}, {"to", series.n_ball}, {"source", "ball-exact"}},
                   {{"from", series.n_ball + 1}, {"to", series.N()}, {"source", "grammar-dp"}}}}};
  j["checks"] = checks_json(r.checks);
  j["warnings"] = r.warnings;
  r.exit_code = std::all_of(r.checks.begin(), r.checks.end(), [](const auto& c) { return c.passed; }) ? 0 : 1;
  j["exit_code"] = r.exit_code;
  r.json = j.dump(2) + "\n";

  std::ostringstream s;
  s << config.name << " (" << p.graph->kind() << ")\n";
  s << "  types: r = " << p.types.r << ", irreducible = " << (p.types.strongly_connected ? "yes" : "no")
    << ", period = " << p.types.period << ", certified at depth " << p.table.depth << "\n";
  s << "  grammar: " << p.grammar.variables.size() << " variables (" << p.grammar.root_count() << " in V0), "
    << p.grammar.productions.size() << " productions, " << p.deps.components.size() << " components\n";
  s << "  case " << cls.case_tag << ": R = " << fmt(cls.R) << ", R_mu = " << fmt(cls.R_mu)
    << ", lambda(R) = " << fmt(cls.lambda_at_R) << "\n";
  s << "  periods: d = " << per.d << ", d_s = " << per.d_s << " (" << per.witness << ")\n";
  s << "  fit: alpha = " << fmt(fit.alpha) << " +- " << fmt(fit.alpha_se) << ", c = " << fmt(fit.c)
    << ", c_bar = " << fmt(fit.c_bar) << (fit.oscillation ? " (oscillating)" : "") << "\n";
  for (const auto& c : r.checks)
    s << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << fmt(c.value) << "\n";
  for (const auto& w : r.warnings) s << "  warning: " << w << "\n";
  r.summary = s.str();
  return r;
}

const std::vector<std::string>& export_kinds() {
  static const std::vector<std::string> kinds{"ball-dot",     "types-dot",  "grammar",      "series-csv",
                                              "depgraph-dot", "types-json", "grammar-json", "lambda-csv"};
  return kinds;
}

std::map<std::string, std::string> run_export(const RunConfig& config, const std::string& what) {
  const auto& kinds = export_kinds();
  if (std::find(kinds.begin(), kinds.end(), what) == kinds.end()) bad("unknown export kind '" + what + "'");
  if (what == "ball-dot") {
    auto g = build_graph(config.graph);
    return {{"ball.dot", ball_to_dot(*g, ball(*g, g->root(), config.ball_radius))}};
  }
  const Pipeline p(config);
  if (what == "types-dot") return {{"types.dot", type_graph_dot(p.types)}};
  if (what == "types-json") return {{"types.json", type_table_json(*p.graph, p.table, p.types) + "\n"}};
  if (what == "grammar") return {{"grammar.txt", grammar_text(p.grammar)}};
  if (what == "grammar-json") return {{"grammar.json", grammar_json(p.grammar) + "\n"}};
  if (what == "depgraph-dot") return {{"depgraph.dot", dependency_dot(p.grammar, p.deps)}};
  const auto cls = p.classification();
  if (what == "lambda-csv") return {{"lambda.csv", lambda_grid_csv(p.system, cls.R, 100)}};
  SeriesOptions so;
  so.n_ball = config.n_ball;
  so.splice_tol = config.splice_tol;
  const auto s = walk_series(*p.graph, p.table, p.grammar, p.mu, p.origin, config.series_n, cls.R_mu, so, nullptr);
  return {{"series.csv", walk_series_csv(s)}};
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const CertificationError*>(&e)) return 3;
  if (dynamic_cast<const ConfigurationError*>(&e) || dynamic_cast<const AlphabetError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const KeyError*>(&e))
    return 2;
  return 1;
}

int thread_count() {
  const char* env = std::getenv("CFWALK_THREADS");
  if (!env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1) return 1;
  return static_cast<int>(std::min<long>(n, 256));
}

}  // namespace cfwalk
