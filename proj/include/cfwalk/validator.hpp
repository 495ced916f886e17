#pragma once

#include <string>
#include <vector>

#include "cfwalk/cones.hpp"
#include "cfwalk/genfun.hpp"
#include "cfwalk/grammar.hpp"
#include "cfwalk/graph.hpp"
#include "cfwalk/step.hpp"

namespace cfwalk {

/// p^(n)(x, y) for n = 0..N, stored as p^(n) * scale^n so long series stay
/// in range.
struct WalkSeries {
  VertexKey x;
  VertexKey y;
  double scale = 1.0;
  std::vector<double> scaled;
  /// Values up to n_ball come from ball matrix powers, the rest from the
  /// grammar DP.
  int n_ball = 0;

  int N() const { return static_cast<int>(scaled.size()) - 1; }
  double value(int n) const;
  /// -inf for zero entries.
  double log_value(int n) const;
  const char* provenance(int n) const { return n <= n_ball ? "ball-exact" : "grammar-dp"; }
};

/// Exact p^(n)(x, y), n <= N, by vector-matrix products on the smallest ball
/// around x that holds every walk of length N ending at y. Throws
/// TruncationError when that ball exceeds vertex_cap.
WalkSeries ball_transition_powers(const GraphOracle& graph, const StepDistribution& mu,
                                  const VertexKey& x, const VertexKey& y, int N,
                                  std::size_t vertex_cap = 4'000'000);

struct SpliceCheck {
  int n_max = 0;
  double max_rel_error = 0.0;
  /// First n where the two sources disagree, or -1.
  int first_failure = -1;
  bool passed = false;
};

struct SeriesOptions {
  int n_ball = 20;
  double splice_tol = 1e-12;
  std::size_t vertex_cap = 4'000'000;
};

/// Grammar DP series from x (a root-piece vertex) to the grammar target,
/// with the first n_ball terms compared against and replaced by ball powers.
WalkSeries walk_series(const GraphOracle& graph, const ConeTypeTable& table, const Grammar& grammar,
                       const StepDistribution& mu, const VertexKey& x, int N, double scale,
                       const SeriesOptions& options, SpliceCheck* check);

/// Entries with n < d(x, y) or n - d(x, y) not divisible by d that are
/// nonzero, for n <= n_max.
std::vector<int> parity_violations(const WalkSeries& s, int distance, int d, int n_max = 200);

struct PeriodInfo {
  int d = 1;
  int d_s = 1;
  std::string witness;
  std::string strong_witness;
  int probe_radius = 0;
};

/// d from an odd cycle in a ball around the origin, d_s from odd cycles in
/// the representative cone truncations. The ball radius is
/// 2 * table.depth + |alphabet|, reduced while the ball would exceed
/// vertex_cap.
PeriodInfo periods(const GraphOracle& graph, const ConeTypeTable& table,
                   std::size_t vertex_cap = 250'000);

struct RmuEstimate {
  double value = 0.0;
  double uncertainty = 0.0;
  int step = 1;
};

/// Aitken-accelerated limit of (p^(n) / p^(n + step))^(1 / step).
RmuEstimate estimate_Rmu(const WalkSeries& s, int step);

struct AsymptoticFit {
  double R_mu_hat = 0.0;
  double R_mu_uncertainty = 0.0;
  double alpha = 0.0;
  double alpha_se = 0.0;
  /// Constants at the classified exponent: p^(n) R_mu^n n^alpha ~ c + (-1)^n c_bar.
  double c = 0.0;
  double c_bar = 0.0;
  double c_se = 0.0;
  double c_bar_se = 0.0;
  bool oscillation = false;
  bool split = false;
  int n_lo = 0;
  int n_hi = 0;
  int step = 1;
  double residual_rms = 0.0;
  double residual_max = 0.0;
};

/// Weighted least squares on n in [N/2, N]. Throws FitError for N < 200 or
/// too few nonzero terms.
AsymptoticFit fit_asymptotics(const WalkSeries& s, const Classification& cls, const PeriodInfo& per);

std::string fit_json(const AsymptoticFit& fit);
std::string periods_json(const PeriodInfo& p);
/// Header `n,p`; values printed in decimal exponent form from the log so that
/// deep terms do not underflow.
std::string walk_series_csv(const WalkSeries& s);

}  // namespace cfwalk
