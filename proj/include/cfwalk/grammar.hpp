#pragma once

#include <string>
#include <vector>

#include <gmpxx.h>

#include "cfwalk/cones.hpp"
#include "cfwalk/step.hpp"

namespace cfwalk {

/// Variable T_{x,y} of a piece: x ranges over the piece, y over the piece's
/// boundary (the single target y0 for the root piece).
struct Variable {
  int piece = 0;
  int x = 0;
  int y = 0;
  std::string name;
};

/// T -> eps, T -> a U, or T -> a V b U.
struct Production {
  enum class Shape { kEpsilon, kLinear, kBridge };
  int lhs = 0;
  Shape shape = Shape::kEpsilon;
  Label a = 0;
  /// U for linear rules, V (the variable of the successor cone) for bridges.
  int first = -1;
  Label b = 0;
  /// U for bridges.
  int second = -1;
};

struct Grammar {
  Alphabet alphabet;
  std::vector<Variable> variables;
  std::vector<Production> productions;
  /// Local id of y0 in the root piece.
  int y0 = 0;
  /// offsets[p] is the index of T(p, 0, 0); root variables come first.
  std::vector<int> offsets;
  std::vector<int> boundary_size;

  int variable(int piece, int x, int y) const;
  /// Root variables carry y = y0, so the diagonal test covers V_0 as well.
  bool epsilon(int v) const { return variables[v].x == variables[v].y; }
  /// Number of variables in V_0, which are the root-piece variables.
  int root_count() const { return offsets.size() > 1 ? offsets[1] : static_cast<int>(variables.size()); }
  int find(const std::string& name) const;
};

/// Productions for every variable of every piece, recursing into successor
/// cones through their canonical boundary order.
Grammar build_grammar(const GraphOracle& graph, const ConeTypeTable& table, const VertexKey& y0);

struct DependencyDigraph {
  std::vector<std::vector<int>> edges;
  /// component[v] is the index of v's strong component; components are
  /// numbered in a topological order of the condensation (sources first).
  std::vector<int> component;
  std::vector<std::vector<int>> components;
  /// Components with no edge leaving them.
  std::vector<int> essential;
  /// Components are exactly V_0 and the union of all V_i, i >= 1.
  bool two_components = false;
  /// Some V_0 variable reaches some essential variable.
  bool root_precedes_essential = false;
  /// Every variable is reachable from every V_0 variable.
  bool all_reachable_from_root = false;
};

DependencyDigraph dependency_analysis(const Grammar& g);

/// Coefficient series of all variables, each multiplied by scale^n to keep
/// long series inside the double range.
struct SeriesTable {
  double scale = 1.0;
  std::vector<std::vector<double>> scaled;

  double value(int var, int n) const;
  /// log c_T(n) without underflow; -inf for zero coefficients.
  double log_value(int var, int n) const;
};

SeriesTable series_all(const Grammar& g, const StepDistribution& mu, int N, double scale = 1.0);

/// c_T(0..N) for one variable, unscaled.
std::vector<double> series_coefficients(const Grammar& g, int T, const StepDistribution& mu, int N);

/// Exact rational coefficients for regression baselines (N <= 50).
std::vector<mpq_class> series_coefficients_exact(const Grammar& g, int T,
                                                 const std::vector<mpq_class>& mu, int N);

std::string grammar_text(const Grammar& g);
std::string grammar_json(const Grammar& g);
std::string dependency_dot(const Grammar& g, const DependencyDigraph& d);
/// Columns n, then one per entry of `columns`, named by `names`.
std::string series_csv(const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns);

}  // namespace cfwalk
