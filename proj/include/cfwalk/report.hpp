#pragma once

#include <map>
#include <string>
#include <vector>

#include "cfwalk/cone_description.hpp"
#include "cfwalk/cones.hpp"
#include "cfwalk/graph.hpp"
#include "cfwalk/step.hpp"

namespace cfwalk {

inline constexpr int kReportSchemaVersion = 1;

struct FactorConfig {
  /// 0 for an infinite cyclic factor.
  int order = 0;
  std::vector<std::string> names;
};

/// family is one of free_group, free_product, schreier, cone_description.
struct GraphConfig {
  std::string family;
  int rank = 0;
  std::vector<FactorConfig> factors;
  std::vector<std::string> subgroup;
  ConeDescriptionSpec description;
};

struct RunConfig {
  std::string name;
  GraphConfig graph;
  /// Empty means uniform.
  std::map<std::string, double> mu;
  /// Words read from the root; both must land in the root piece.
  std::string origin;
  std::string target;
  AssignOptions types;
  double classify_tol = 1e-6;
  double splice_tol = 1e-12;
  double alpha_tol = 0.15;
  double rmu_tol = 2e-3;
  double lambda_prime_tol = 1e-5;
  int series_n = 5000;
  int n_ball = 20;
  int ball_radius = 3;
  std::string output_dir = "out";
};

/// Parses and validates a JSON run configuration; throws ConfigurationError
/// tagged cli-report on schema violations, bad weights or tolerances.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical JSON of a config with all defaults filled in.
std::string config_canonical(const RunConfig& config);
/// 64-bit FNV-1a of the canonical form, as 16 hex digits.
std::string config_hash(const RunConfig& config);

OraclePtr build_graph(const GraphConfig& graph);
StepDistribution build_mu(const GraphOracle& graph, const RunConfig& config);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct RunReport {
  /// 0 when every check passed, 1 otherwise.
  int exit_code = 0;
  std::string json;
  std::string summary;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;
};

/// Full pipeline. Module errors propagate; see exit_code_for.
RunReport run_analyze(const RunConfig& config);
/// Exactness and structure checks only, no fits.
RunReport run_validate(const RunConfig& config);

/// File name and contents for one export kind: ball-dot, types-dot, grammar,
/// series-csv, depgraph-dot, types-json, grammar-json, lambda-csv.
std::map<std::string, std::string> run_export(const RunConfig& config, const std::string& what);
const std::vector<std::string>& export_kinds();

/// 2 for configuration problems, 3 for failed type certification, 1 for
/// any other error.
int exit_code_for(const std::exception& e);

/// Worker count from CFWALK_THREADS, at least 1.
int thread_count();

}  // namespace cfwalk
