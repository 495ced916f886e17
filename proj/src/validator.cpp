#include "cfwalk/validator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "cfwalk/errors.hpp"

namespace cfwalk {

double WalkSeries::value(int n) const { return std::exp(log_value(n)); }

double WalkSeries::log_value(int n) const {
  const double v = scaled.at(n);
  if (v <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(v) - n * std::log(scale);
}

WalkSeries ball_transition_powers(const GraphOracle& graph, const StepDistribution& mu,
                                  const VertexKey& x, const VertexKey& y, int N,
                                  std::size_t vertex_cap) {
  if (N < 0) throw ConfigurationError("walk-validator", "series length must be >= 0");
  validate_step_distribution(graph.alphabet(), mu);
  WalkSeries s;
  s.x = x;
  s.y = y;
  s.n_ball = N;
  s.scaled.assign(N + 1, 0.0);
  const auto dist = graph_distance(graph, x, y, N);
  if (!dist) return s;
  BallView view;
  try {
    view = ball(graph, x, (N + *dist) / 2, vertex_cap);
  } catch (const TruncationError&) {
    throw TruncationError("ball for " + std::to_string(N) + " steps exceeds " +
                          std::to_string(vertex_cap) + " vertices; use the grammar DP series instead");
  }
  const std::size_t m = view.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> out(m);
  for (const auto& e : view.edges) out[e.from].emplace_back(e.to, mu[e.label]);
  const std::size_t target = *view.find(y);
  std::vector<double> p(m, 0.0), next(m);
  p[0] = 1.0;
  for (int n = 0; n <= N; ++n) {
    s.scaled[n] = p[target];
    if (n == N) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t v = 0; v < m; ++v)
      if (p[v] != 0.0)
        for (const auto& [w, q] : out[v]) next[w] += p[v] * q;
    p.swap(next);
  }
  return s;
}

WalkSeries walk_series(const GraphOracle& graph, const ConeTypeTable& table, const Grammar& grammar,
                       const StepDistribution& mu, const VertexKey& x, int N, double scale,
                       const SeriesOptions& options, SpliceCheck* check) {
  const auto& root = table.pieces.at(0).vertices;
  const auto it = std::find(root.begin(), root.end(), x);
  if (it == root.end())
    throw ConfigurationError("walk-validator", "origin " + graph.format_key(x) + " is not in the root piece");
  const int var = grammar.variable(0, static_cast<int>(it - root.begin()), grammar.y0);
  auto table_dp = series_all(grammar, mu, N, scale);
  WalkSeries s;
  s.x = x;
  s.y = root[grammar.y0];
  s.scale = scale;
  s.scaled = std::move(table_dp.scaled[var]);
  const int nb = std::min(options.n_ball, N);
  const auto exact = ball_transition_powers(graph, mu, x, s.y, nb, options.vertex_cap);
  SpliceCheck sc;
  sc.n_max = nb;
  for (int n = 0; n <= nb; ++n) {
    const double want = exact.scaled[n];
    const double got = s.scaled[n] * std::pow(scale, -n);
    const double err = want == 0.0 ? (got == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                   : std::abs(got - want) / want;
    sc.max_rel_error = std::max(sc.max_rel_error, err);
    if (err > options.splice_tol && sc.first_failure < 0) sc.first_failure = n;
    s.scaled[n] = want * std::pow(scale, n);
  }
  sc.passed = sc.first_failure < 0;
  s.n_ball = nb;
  if (check) *check = sc;
  return s;
}

std::vector<int> parity_violations(const WalkSeries& s, int distance, int d, int n_max) {
  std::vector<int> bad;
  for (int n = 0; n <= std::min(n_max, s.N()); ++n) {
    const bool allowed = n >= distance && (n - distance) % d == 0;
    if (!allowed && s.scaled[n] != 0.0) bad.push_back(n);
  }
  return bad;
}

namespace {

// Two-colouring of an explicit edge list; returns a vertex on an odd cycle or -1.
int odd_cycle_vertex(std::size_t n, const std::vector<PieceEdge>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    adj[e.from].push_back(e.to);
    adj[e.to].push_back(e.from);
  }
  std::vector<int> colour(n, -1), queue;
  for (std::size_t s = 0; s < n; ++s) {
    if (colour[s] >= 0) continue;
    colour[s] = 0;
    queue.assign(1, static_cast<int>(s));
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int u = queue[h];
      for (int v : adj[u]) {
        if (colour[v] < 0) {
          colour[v] = 1 - colour[u];
          queue.push_back(v);
        } else if (colour[v] == colour[u]) {
          return u;
        }
      }
    }
  }
  return -1;
}

}  // namespace

PeriodInfo periods(const GraphOracle& graph, const ConeTypeTable& table, std::size_t vertex_cap) {
  PeriodInfo p;
  const int target = 2 * table.depth + static_cast<int>(graph.alphabet().size());
  const Label labels = static_cast<Label>(graph.alphabet().size());

  // Level-by-level BFS; an edge inside one distance level closes an odd cycle.
  KeyMap<int> level;
  std::vector<VertexKey> current{table.origin};
  level.emplace(table.origin, 0);
  std::vector<VertexKey> order{table.origin};
  std::size_t total = 1;
  int radius = 0;
  while (radius < target) {
    std::vector<VertexKey> next;
    for (const auto& u : current)
      for (Label a = 0; a < labels; ++a) {
        auto v = graph.neighbor(u, a);
        if (level.emplace(v, radius + 1).second) next.push_back(std::move(v));
      }
    if (total + next.size() > vertex_cap) {
      for (const auto& v : next) level.erase(v);
      break;
    }
    ++radius;
    total += next.size();
    order.insert(order.end(), next.begin(), next.end());
    current = std::move(next);
  }
  p.probe_radius = radius;
  p.d = 2;
  // Loops are the shortest odd cycles; report one when there is any.
  for (int pass = 0; pass < 2 && p.d == 2; ++pass)
    for (const auto& u : order) {
      const int lu = level.at(u);
      for (Label a = 0; a < labels && p.d == 2; ++a) {
        const auto v = graph.neighbor(u, a);
        if ((pass == 0) != (v == u)) continue;
        const auto it = level.find(v);
        if (it == level.end() || it->second != lu) continue;
        p.d = 1;
        p.witness = v == u ? "loop " + graph.alphabet().name(a) + " at " + graph.format_key(u)
                           : "edge " + graph.format_key(u) + " -" + graph.alphabet().name(a) + "- " +
                                 graph.format_key(v) + " within distance level " + std::to_string(lu);
      }
      if (p.d == 1) break;
    }
  if (p.d == 2)
    p.witness = "bipartition of B(o, " + std::to_string(radius) + ") by distance parity (" +
                std::to_string(total) + " vertices)";

  p.d_s = 2;
  for (const auto& cone : representative_truncations(graph, table, table.depth)) {
    const int v = odd_cycle_vertex(cone.vertices.size(), cone.edges);
    if (v < 0) continue;
    p.d_s = 1;
    p.strong_witness = "odd cycle in the representative cone of type " + std::to_string(cone.type) +
                       " through " + graph.format_key(cone.vertices[v]);
    break;
  }
  if (p.d_s == 2)
    p.strong_witness = "representative cone truncations to depth " + std::to_string(table.depth) +
                       " are bipartite";
  return p;
}

RmuEstimate estimate_Rmu(const WalkSeries& s, int step) {
  const int N = s.N();
  if (N < 200) throw FitError("R_mu estimate needs at least 200 terms, got " + std::to_string(N));
  if (step < 1) throw FitError("ratio step must be >= 1");
  int n0 = N - step;
  while (n0 >= N / 2 && !(s.scaled[n0] > 0.0 && s.scaled[n0 + step] > 0.0)) --n0;
  if (n0 < N / 2) throw FitError("series tail vanishes on every residue class mod " + std::to_string(step));
  auto ratio = [&](int n) { return std::exp((s.log_value(n) - s.log_value(n + step)) / step); };
  auto aitken = [&](int h) {
    const double x0 = ratio(n0 - 2 * h), x1 = ratio(n0 - h), x2 = ratio(n0);
    const double den = x2 - 2 * x1 + x0;
    if (!std::isfinite(den) || std::abs(den) < 1e-300) return x2;
    return x2 - (x2 - x1) * (x2 - x1) / den;
  };
  const int h = std::max(step, N / 10 / step * step);
  RmuEstimate e;
  e.step = step;
  e.value = aitken(h);
  const double half = aitken(std::max(step, h / 2 / step * step));
  e.uncertainty = std::abs(e.value - half) + std::abs(e.value - ratio(n0)) / 10;
  if (!std::isfinite(e.value)) throw FitError("ratio estimate is not finite");
  return e;
}

namespace {

struct Wls {
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  Eigen::VectorXd residual;
};

Wls weighted_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd Xw = w.cwiseSqrt().asDiagonal() * X;
  const Eigen::VectorXd yw = w.cwiseSqrt().cwiseProduct(y);
  Wls r;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
  r.beta = qr.solve(yw);
  r.residual = y - X * r.beta;
  const double dof = std::max<double>(1.0, static_cast<double>(X.rows() - X.cols()));
  const double sigma2 = (w.cwiseProduct(r.residual.cwiseAbs2())).sum() / dof;
  const Eigen::MatrixXd cov = sigma2 * (Xw.transpose() * Xw).inverse();
  r.se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return r;
}

}  // namespace

AsymptoticFit fit_asymptotics(const WalkSeries& s, const Classification& cls, const PeriodInfo& per) {
  const int N = s.N();
  if (N < 200) throw FitError("asymptotic fit needs at least 200 terms, got " + std::to_string(N));
  AsymptoticFit f;
  f.n_lo = N / 2;
  f.n_hi = N;
  f.step = per.d_s;
  f.split = per.d == 1;
  std::vector<int> ns;
  for (int n = f.n_lo; n <= f.n_hi; ++n)
    if (s.scaled[n] > 0.0) ns.push_back(n);
  if (ns.size() < 20) throw FitError("fewer than 20 nonzero terms in the fit window");

  const auto est = estimate_Rmu(s, per.d_s);
  f.R_mu_hat = est.value;
  f.R_mu_uncertainty = est.uncertainty;

  const double logR = std::log(cls.R_mu);
  const Eigen::Index m = static_cast<Eigen::Index>(ns.size());
  const int k = f.split ? 3 : 2;
  Eigen::MatrixXd X(m, k);
  Eigen::VectorXd y(m), w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const int n = ns[i];
    X(i, 0) = 1.0;
    X(i, 1) = std::log(static_cast<double>(n));
    if (f.split) X(i, 2) = n % 2 == 0 ? 1.0 : -1.0;
    y(i) = s.log_value(n) + n * logR;
    w(i) = n;
  }
  const auto slope = weighted_least_squares(X, y, w);
  f.alpha = -slope.beta(1);
  f.alpha_se = slope.se(1);
  f.residual_rms = std::sqrt(slope.residual.squaredNorm() / static_cast<double>(m));
  f.residual_max = slope.residual.cwiseAbs().maxCoeff();

  // Constants with the exponent held at its classified value; the 1/n and
  // 1/n^2 columns soak up the leading corrections. The fit error adds the drift
  // between the full window and its upper half, which bounds what the
  // dropped higher-order terms can do, and a relative floor for rounding in
  // the series itself.
  const double e = cls.exponent();
  const int kc = f.split ? 6 : 3;
  auto constants = [&](Eigen::Index from) {
    const Eigen::Index rows = m - from;
    Eigen::MatrixXd C(rows, kc);
    Eigen::VectorXd u(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const int n = ns[from + i];
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      const double inv = 1.0 / n;
      C(i, 0) = 1.0;
      C(i, 1) = inv;
      C(i, 2) = inv * inv;
      if (f.split) {
        C(i, 3) = sign;
        C(i, 4) = sign * inv;
        C(i, 5) = sign * inv * inv;
      }
      u(i) = std::exp(y(from + i) + e * std::log(static_cast<double>(n)));
    }
    return weighted_least_squares(C, u, Eigen::VectorXd::Ones(rows));
  };
  const auto full = constants(0);
  const auto tail = constants(m / 2);
  f.c = full.beta(0);
  const double floor = 1e-10 * std::abs(full.beta(0));
  f.c_se = std::hypot(std::hypot(full.se(0), full.beta(0) - tail.beta(0)), floor);
  if (f.split) {
    f.c_bar = full.beta(3);
    f.c_bar_se = std::hypot(std::hypot(full.se(3), full.beta(3) - tail.beta(3)), floor);
    f.oscillation = std::abs(f.c_bar) > 3 * f.c_bar_se;
  }
  return f;
}

std::string fit_json(const AsymptoticFit& fit) {
  nlohmann::json j;
  j["R_mu_hat"] = fit.R_mu_hat;
  j["R_mu_uncertainty"] = fit.R_mu_uncertainty;
  j["alpha"] = fit.alpha;
  j["alpha_se"] = fit.alpha_se;
  j["c"] = fit.c;
  j["c_bar"] = fit.c_bar;
  j["c_se"] = fit.c_se;
  j["c_bar_se"] = fit.c_bar_se;
  j["oscillation"] = fit.oscillation;
  j["even_odd_split"] = fit.split;
  j["window"] = {fit.n_lo, fit.n_hi};
  j["ratio_step"] = fit.step;
  j["residual_rms"] = fit.residual_rms;
  j["residual_max"] = fit.residual_max;
  return j.dump(2);
}

std::string periods_json(const PeriodInfo& p) {
  nlohmann::json j;
  j["d"] = p.d;
  j["d_s"] = p.d_s;
  j["witness"] = p.witness;
  j["strong_witness"] = p.strong_witness;
  j["probe_radius"] = p.probe_radius;
  return j.dump(2);
}

std::string walk_series_csv(const WalkSeries& s) {
  std::ostringstream out;
  out << "n,p\n";
  char buf[64];
  for (int n = 0; n <= s.N(); ++n) {
    const double lg = s.log_value(n);
    if (std::isinf(lg)) {
      out << n << ",0\n";
      continue;
    }
    const double l10 = lg / std::log(10.0);
    double e = std::floor(l10);
    double mant = std::pow(10.0, l10 - e);
    if (mant >= 10.0) {
      mant /= 10.0;
      e += 1;
    }
    std::snprintf(buf, sizeof buf, "%.15ge%+d", mant, static_cast<int>(e));
    out << n << ',' << buf << '\n';
  }
  return out.str();
}

}  // namespace cfwalk
