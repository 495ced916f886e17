#include "cfwalk/grammar.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cfwalk/errors.hpp"

namespace cfwalk {

int Grammar::variable(int piece, int x, int y) const {
  if (piece == 0) {
    if (y != y0) throw GrammarError("root variables must target y0");
    return offsets[0] + x;
  }
  return offsets[piece] + x * boundary_size[piece] + y;
}

int Grammar::find(const std::string& name) const {
  for (std::size_t v = 0; v < variables.size(); ++v)
    if (variables[v].name == name) return static_cast<int>(v);
  throw GrammarError("unknown variable '" + name + "'");
}

Grammar build_grammar(const GraphOracle& graph, const ConeTypeTable& table, const VertexKey& y0) {
  Grammar g;
  g.alphabet = graph.alphabet();
  const auto& root = table.pieces.at(0);
  auto it = std::find(root.vertices.begin(), root.vertices.end(), y0);
  if (it == root.vertices.end())
    throw GrammarError("target vertex " + graph.format_key(y0) + " is outside the root piece");
  g.y0 = static_cast<int>(it - root.vertices.begin());

  auto name = [](int p, int x, int y) {
    return "T" + std::to_string(p) + "." + std::to_string(x) + "." + std::to_string(y);
  };
  int next = 0;
  for (std::size_t p = 0; p < table.pieces.size(); ++p) {
    const int k = static_cast<int>(table.pieces[p].vertices.size());
    g.offsets.push_back(next);
    g.boundary_size.push_back(p == 0 ? 1 : k);
    if (p == 0) {
      for (int x = 0; x < k; ++x) g.variables.push_back({0, x, g.y0, name(0, x, g.y0)});
      next += k;
    } else {
      for (int x = 0; x < k; ++x)
        for (int y = 0; y < k; ++y) g.variables.push_back({static_cast<int>(p), x, y, name(static_cast<int>(p), x, y)});
      next += k * k;
    }
  }

  const Alphabet& al = g.alphabet;
  for (std::size_t v = 0; v < g.variables.size(); ++v) {
    const Variable& var = g.variables[v];
    const Piece& piece = table.pieces[var.piece];
    const int lhs = static_cast<int>(v);
    if (var.x == var.y) g.productions.push_back({lhs, Production::Shape::kEpsilon, 0, -1, 0, -1});
    for (const auto& e : piece.edges) {
      if (e.from != var.x) continue;
      g.productions.push_back({lhs, Production::Shape::kLinear, e.label, g.variable(var.piece, e.to, var.y), 0, -1});
    }
    for (const auto& child : piece.children) {
      for (const auto& in : child.attach) {
        if (in.from != var.x) continue;
        // Leaving the cone again uses the reverse of an attachment edge.
        for (const auto& out : child.attach) {
          g.productions.push_back({lhs, Production::Shape::kBridge, in.label,
                                   g.variable(child.type, in.to, out.to), al.inverse(out.label),
                                   g.variable(var.piece, out.from, var.y)});
        }
      }
    }
  }
  for (const auto& p : g.productions) {
    // Every rule emits a terminal before any variable, so there are no chain rules.
    assert(p.shape == Production::Shape::kEpsilon || p.first >= 0);
    if (p.first >= static_cast<int>(g.variables.size()) || p.second >= static_cast<int>(g.variables.size()))
      throw GrammarError("production refers to a missing variable");
  }
  return g;
}

DependencyDigraph dependency_analysis(const Grammar& g) {
  DependencyDigraph d;
  const int n = static_cast<int>(g.variables.size());
  d.edges.assign(n, {});
  for (const auto& p : g.productions) {
    if (p.first >= 0) d.edges[p.lhs].push_back(p.first);
    if (p.second >= 0) d.edges[p.lhs].push_back(p.second);
  }
  for (auto& e : d.edges) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }

  // Iterative Tarjan.
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on(n, false);
  std::vector<std::vector<int>> found;
  int counter = 0;
  for (int s = 0; s < n; ++s) {
    if (index[s] >= 0) continue;
    std::vector<std::pair<int, std::size_t>> call{{s, 0}};
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on[s] = true;
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i < d.edges[v].size()) {
        const int w = d.edges[v][i++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = true;
          call.emplace_back(w, 0);
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        found.push_back(std::move(comp));
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  // Tarjan emits sinks first.
  std::reverse(found.begin(), found.end());
  d.components = std::move(found);
  d.component.assign(n, 0);
  for (std::size_t c = 0; c < d.components.size(); ++c)
    for (int v : d.components[c]) d.component[v] = static_cast<int>(c);
  for (std::size_t c = 0; c < d.components.size(); ++c) {
    bool leaves = false;
    for (int v : d.components[c])
      for (int w : d.edges[v])
        if (d.component[w] != static_cast<int>(c)) leaves = true;
    if (!leaves) d.essential.push_back(static_cast<int>(c));
  }

  const int roots = g.root_count();
  auto reach_from = [&](int s) {
    std::vector<bool> seen(n, false);
    std::vector<int> st{s};
    seen[s] = true;
    while (!st.empty()) {
      const int v = st.back();
      st.pop_back();
      for (int w : d.edges[v])
        if (!seen[w]) {
          seen[w] = true;
          st.push_back(w);
        }
    }
    return seen;
  };
  d.all_reachable_from_root = true;
  for (int r = 0; r < roots; ++r) {
    const auto seen = reach_from(r);
    for (int v = 0; v < n; ++v) {
      if (!seen[v]) d.all_reachable_from_root = false;
      if (seen[v] && v >= roots) d.root_precedes_essential = true;
    }
  }
  if (d.components.size() == 2) {
    std::vector<int> v0(roots);
    for (int i = 0; i < roots; ++i) v0[i] = i;
    d.two_components = d.components[0] == v0;
  }
  return d;
}

namespace {

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct ExactSum {
  mpq_class sum = 0;
  void add(const mpq_class& x) { sum += x; }
  mpq_class value() const { return sum; }
};

// Bridge rules with the same (V, U) share one convolution per n.
template <class Num>
struct Plan {
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<std::pair<int, Num>>> linear;  // per lhs: (U, weight)
  std::vector<std::vector<std::pair<int, Num>>> bridge;  // per lhs: (pair, weight)
};

template <class Num, class W>
Plan<Num> make_plan(const Grammar& g, const W& weight) {
  Plan<Num> plan;
  const std::size_t n = g.variables.size();
  plan.linear.assign(n, {});
  plan.bridge.assign(n, {});
  std::map<std::pair<int, int>, int> pair_index;
  for (const auto& p : g.productions) {
    if (p.shape == Production::Shape::kLinear) {
      plan.linear[p.lhs].emplace_back(p.first, weight(p.a));
    } else if (p.shape == Production::Shape::kBridge) {
      auto key = std::pair(p.first, p.second);
      auto [it, fresh] = pair_index.emplace(key, static_cast<int>(plan.pairs.size()));
      if (fresh) plan.pairs.push_back(key);
      Num w = weight(p.a);
      w *= weight(p.b);
      plan.bridge[p.lhs].emplace_back(it->second, w);
    }
  }
  return plan;
}

template <class Num, class Acc>
std::vector<std::vector<Num>> run_dp(const Grammar& g, const Plan<Num>& plan, int N) {
  const std::size_t nv = g.variables.size();
  std::vector<std::vector<Num>> c(nv, std::vector<Num>(N + 1, Num(0)));
  std::vector<Num> conv(plan.pairs.size(), Num(0));
  for (int n = 0; n <= N; ++n) {
    for (std::size_t q = 0; q < plan.pairs.size(); ++q) {
      Acc acc;
      const auto& cv = c[plan.pairs[q].first];
      const auto& cu = c[plan.pairs[q].second];
      for (int k = 0; k <= n - 2; ++k) {
        Num t = cv[k];
        t *= cu[n - 2 - k];
        acc.add(t);
      }
      conv[q] = acc.value();
    }
    for (std::size_t v = 0; v < nv; ++v) {
      Acc acc;
      if (n == 0 && g.epsilon(static_cast<int>(v))) acc.add(Num(1));
      if (n >= 1)
        for (const auto& [u, w] : plan.linear[v]) {
          Num t = w;
          t *= c[u][n - 1];
          acc.add(t);
        }
      if (n >= 2)
        for (const auto& [q, w] : plan.bridge[v]) {
          Num t = w;
          t *= conv[q];
          acc.add(t);
        }
      c[v][n] = acc.value();
    }
  }
  return c;
}

}  // namespace

double SeriesTable::value(int var, int n) const { return std::exp(log_value(var, n)); }

double SeriesTable::log_value(int var, int n) const {
  const double s = scaled.at(var).at(n);
  if (s <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(s) - n * std::log(scale);
}

SeriesTable series_all(const Grammar& g, const StepDistribution& mu, int N, double scale) {
  if (N < 0) throw ConfigurationError("grammar-builder", "series length must be >= 0");
  if (!(scale > 0.0)) throw ConfigurationError("grammar-builder", "series scale must be positive");
  validate_step_distribution(g.alphabet, mu);
  auto plan = make_plan<double>(g, [&](Label a) { return mu[a] * scale; });
  SeriesTable t;
  t.scale = scale;
  t.scaled = run_dp<double, Neumaier>(g, plan, N);
  return t;
}

std::vector<double> series_coefficients(const Grammar& g, int T, const StepDistribution& mu, int N) {
  if (T < 0 || T >= static_cast<int>(g.variables.size())) throw GrammarError("variable out of range");
  return series_all(g, mu, N).scaled[T];
}

std::vector<mpq_class> series_coefficients_exact(const Grammar& g, int T,
                                                 const std::vector<mpq_class>& mu, int N) {
  if (N < 0 || N > 50) throw ConfigurationError("grammar-builder", "exact series supports 0 <= N <= 50");
  if (T < 0 || T >= static_cast<int>(g.variables.size())) throw GrammarError("variable out of range");
  if (mu.size() != g.alphabet.size())
    throw ConfigurationError("grammar-builder", "exact weights do not match the alphabet");
  auto plan = make_plan<mpq_class>(g, [&](Label a) { return mu[a]; });
  return run_dp<mpq_class, ExactSum>(g, plan, N)[T];
}

std::string grammar_text(const Grammar& g) {
  std::ostringstream s;
  for (const auto& p : g.productions) {
    s << g.variables[p.lhs].name << " ->";
    switch (p.shape) {
      case Production::Shape::kEpsilon:
        s << " eps";
        break;
      case Production::Shape::kLinear:
        s << ' ' << g.alphabet.name(p.a) << ' ' << g.variables[p.first].name;
        break;
      case Production::Shape::kBridge:
        s << ' ' << g.alphabet.name(p.a) << ' ' << g.variables[p.first].name << ' '
          << g.alphabet.name(p.b) << ' ' << g.variables[p.second].name;
        break;
    }
    s << '\n';
  }
  return s.str();
}

std::string grammar_json(const Grammar& g) {
  using nlohmann::json;
  json j;
  j["y0"] = g.y0;
  json vars = json::array();
  for (std::size_t v = 0; v < g.variables.size(); ++v) {
    const auto& var = g.variables[v];
    vars.push_back({{"name", var.name},
                    {"piece", var.piece},
                    {"x", var.x},
                    {"y", var.y},
                    {"epsilon", g.epsilon(static_cast<int>(v))}});
  }
  j["variables"] = vars;
  json prods = json::array();
  for (const auto& p : g.productions) {
    json rhs = json::array();
    if (p.shape != Production::Shape::kEpsilon) {
      rhs.push_back(g.alphabet.name(p.a));
      rhs.push_back(g.variables[p.first].name);
    }
    if (p.shape == Production::Shape::kBridge) {
      rhs.push_back(g.alphabet.name(p.b));
      rhs.push_back(g.variables[p.second].name);
    }
    prods.push_back({{"lhs", g.variables[p.lhs].name}, {"rhs", rhs}});
  }
  j["productions"] = prods;
  return j.dump(2);
}

std::string dependency_dot(const Grammar& g, const DependencyDigraph& d) {
  std::ostringstream s;
  s << "digraph dependency {\n";
  for (std::size_t c = 0; c < d.components.size(); ++c) {
    s << "  subgraph cluster_" << c << " {\n";
    for (int v : d.components[c]) s << "    \"" << g.variables[v].name << "\";\n";
    s << "  }\n";
  }
  for (std::size_t v = 0; v < d.edges.size(); ++v)
    for (int w : d.edges[v]) s << "  \"" << g.variables[v].name << "\" -> \"" << g.variables[w].name << "\";\n";
  s << "}\n";
  return s.str();
}

std::string series_csv(const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns) {
  std::ostringstream s;
  s << 'n';
  for (const auto& n : names) s << ',' << n;
  s << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  char buf[32];
  for (std::size_t r = 0; r < rows; ++r) {
    s << r;
    for (const auto& col : columns) {
      std::snprintf(buf, sizeof buf, "%.17g", col[r]);
      s << ',' << buf;
    }
    s << '\n';
  }
  return s.str();
}

}  // namespace cfwalk
