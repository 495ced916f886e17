#include "cfwalk/genfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cfwalk/errors.hpp"

namespace cfwalk {

double GenFunSystem::pol(int t, double z, const std::vector<double>& y) const {
  double s = delta[t];
  for (const auto& l : linear[t]) s += l.w * z * y[l.u];
  for (const auto& q : quadratic[t]) s += q.w * z * z * y[q.v] * y[q.u];
  return s;
}

GenFunSystem make_system(const Grammar& g, const StepDistribution& mu) {
  validate_step_distribution(g.alphabet, mu);
  GenFunSystem sys;
  sys.size = static_cast<int>(g.variables.size());
  sys.root_count = g.root_count();
  sys.delta.assign(sys.size, 0.0);
  sys.linear.assign(sys.size, {});
  sys.quadratic.assign(sys.size, {});
  for (const auto& v : g.variables) sys.names.push_back(v.name);
  for (const auto& p : g.productions) {
    switch (p.shape) {
      case Production::Shape::kEpsilon:
        sys.delta[p.lhs] = 1.0;
        break;
      case Production::Shape::kLinear:
        sys.linear[p.lhs].push_back({mu[p.a], p.first});
        break;
      case Production::Shape::kBridge:
        sys.quadratic[p.lhs].push_back({mu[p.a] * mu[p.b], p.first, p.second});
        break;
    }
  }
  for (int t = sys.root_count; t < sys.size; ++t) sys.essential.push_back(t);
  const auto dep = dependency_analysis(g);
  // Components come sources first; solving needs dependencies first.
  for (auto it = dep.components.rbegin(); it != dep.components.rend(); ++it) {
    if (it->front() < sys.root_count) continue;
    sys.blocks.push_back(*it);
  }
  for (int t = 0; t < sys.root_count; ++t)
    for (const auto& q : sys.quadratic[t])
      if (q.v < sys.root_count || q.u >= sys.root_count)
        throw GrammarError("root equation " + sys.names[t] + " is not linear over V_0");
  return sys;
}

namespace {

// d Pol_t / d y_s for t, s inside `block` (local indexing).
Eigen::MatrixXd block_jacobian(const GenFunSystem& sys, double z, const std::vector<double>& y,
                               const std::vector<int>& block, const std::vector<int>& local) {
  const int m = static_cast<int>(block.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const int t = block[i];
    for (const auto& l : sys.linear[t])
      if (local[l.u] >= 0) j(i, local[l.u]) += l.w * z;
    for (const auto& q : sys.quadratic[t]) {
      if (local[q.v] >= 0) j(i, local[q.v]) += q.w * z * z * y[q.u];
      if (local[q.u] >= 0) j(i, local[q.u]) += q.w * z * z * y[q.v];
    }
  }
  return j;
}

// Solves the blocks not yet marked as done, in dependency order.
bool solve_blocks(const GenFunSystem& sys, double z, std::vector<double>& y, std::vector<bool>& done,
                  const EvalOptions& opt, int& iterations, std::string& reason) {
  std::vector<int> local(sys.size, -1);
  for (const auto& block : sys.blocks) {
    if (done[block.front()]) continue;
    const int m = static_cast<int>(block.size());
    for (int i = 0; i < m; ++i) local[block[i]] = i;
    bool ok = false;
    for (int it = 0; it < opt.newton_cap; ++it) {
      ++iterations;
      Eigen::VectorXd residual(m);
      double scale = 1.0;
      for (int i = 0; i < m; ++i) {
        residual(i) = sys.pol(block[i], z, y) - y[block[i]];
        scale = std::max(scale, std::abs(y[block[i]]));
      }
      if (residual.lpNorm<Eigen::Infinity>() <= 4 * std::numeric_limits<double>::epsilon() * scale) {
        ok = true;
        break;
      }
      Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m) - block_jacobian(sys, z, y, block, local);
      Eigen::VectorXd step = a.fullPivLu().solve(residual);
      double worst = 0.0;
      for (int i = 0; i < m; ++i) {
        if (!std::isfinite(step(i))) {
          reason = "singular Newton system";
          return false;
        }
        // From below the least solution every step is nonnegative.
        if (step(i) < -1e-9 * std::max(1.0, std::abs(y[block[i]]))) {
          reason = "Newton step left the nonnegative cone";
          return false;
        }
        y[block[i]] += step(i);
        if (y[block[i]] > opt.divergence_bound) {
          reason = "value exceeded the divergence bound";
          return false;
        }
        worst = std::max(worst, std::abs(step(i)));
      }
      if (worst <= opt.tol * scale) {
        ok = true;
        break;
      }
    }
    for (int i = 0; i < m; ++i) local[block[i]] = -1;
    if (!ok) {
      reason = "iteration cap reached";
      return false;
    }
    for (int t : block) done[t] = true;
  }
  return true;
}

std::vector<int> downstream(const GenFunSystem& sys, const std::vector<int>& block) {
  std::vector<bool> seen(sys.size, false);
  std::vector<int> stack(block.begin(), block.end()), out;
  for (int t : block) seen[t] = true;
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    out.push_back(t);
    auto visit = [&](int u) {
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    };
    for (const auto& l : sys.linear[t]) visit(l.u);
    for (const auto& q : sys.quadratic[t]) {
      visit(q.v);
      visit(q.u);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Newton on (y, v, z): y = Pol(z, y), J_SS v = v, sum v = 1. The fold point
// where the block's spectral radius reaches 1 is a regular root of this system.
bool refine_fold(const GenFunSystem& sys, const std::vector<int>& block, double z0,
                 std::vector<double>& y, double& z_out) {
  const std::vector<int> vars = downstream(sys, block);
  const int nd = static_cast<int>(vars.size());
  const int ns = static_cast<int>(block.size());
  const int n = nd + ns + 1;
  std::vector<int> local(sys.size, -1);
  for (int i = 0; i < ns; ++i) local[block[i]] = i;

  auto jac = block_jacobian(sys, z0, y, block, local);
  Eigen::EigenSolver<Eigen::MatrixXd> es(jac);
  int best = 0;
  for (int i = 1; i < ns; ++i)
    if (es.eigenvalues()(i).real() > es.eigenvalues()(best).real()) best = i;
  Eigen::VectorXd v0 = es.eigenvectors().col(best).real();
  if (v0.sum() < 0) v0 = -v0;
  v0 /= v0.sum();

  Eigen::VectorXd x(n);
  for (int i = 0; i < nd; ++i) x(i) = y[vars[i]];
  for (int i = 0; i < ns; ++i) x(nd + i) = v0(i);
  x(n - 1) = z0;

  std::vector<double> work = y;
  auto residual = [&](const Eigen::VectorXd& p) {
    for (int i = 0; i < nd; ++i) work[vars[i]] = p(i);
    const double z = p(n - 1);
    Eigen::VectorXd r(n);
    for (int i = 0; i < nd; ++i) r(i) = p(i) - sys.pol(vars[i], z, work);
    const auto j = block_jacobian(sys, z, work, block, local);
    const Eigen::VectorXd v = p.segment(nd, ns);
    r.segment(nd, ns) = j * v - v;
    r(n - 1) = v.sum() - 1.0;
    return r;
  };

  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd r = residual(x);
    if (r.lpNorm<Eigen::Infinity>() < 1e-15 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) break;
    Eigen::MatrixXd jm(n, n);
    for (int k = 0; k < n; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
      Eigen::VectorXd xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      jm.col(k) = (residual(xp) - residual(xm)) / (2 * h);
    }
    const Eigen::VectorXd step = jm.fullPivLu().solve(r);
    if (!step.allFinite()) return false;
    x -= step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-15 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) break;
  }
  if (!residual(x).allFinite() || residual(x).lpNorm<Eigen::Infinity>() > 1e-11) return false;
  for (int i = 0; i < nd; ++i)
    if (x(i) < 0) return false;
  for (int i = 0; i < ns; ++i)
    if (x(nd + i) < -1e-12) return false;
  for (int i = 0; i < nd; ++i) y[vars[i]] = x(i);
  z_out = x(n - 1);
  return true;
}

std::vector<std::vector<int>> reach_sets(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<std::vector<int>> out(n);
  for (int s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::vector<int> st{s};
    seen[s] = true;
    while (!st.empty()) {
      const int u = st.back();
      st.pop_back();
      for (int v = 0; v < n; ++v)
        if (m(u, v) > 0 && !seen[v]) {
          seen[v] = true;
          st.push_back(v);
        }
    }
    for (int v = 0; v < n; ++v)
      if (seen[v]) out[s].push_back(v);
  }
  return out;
}

// Power iteration on M + I; the shift removes periodicity.
Eigen::VectorXd power_vector(const Eigen::MatrixXd& a, double& rate, int& iterations) {
  const int n = static_cast<int>(a.rows());
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  double prev = 0.0;
  for (int it = 0; it < 2'000'000; ++it) {
    ++iterations;
    Eigen::VectorXd y = a * x;
    const double norm = y.sum();
    y /= norm;
    const double change = (y - x).lpNorm<1>();
    x = y;
    if (std::abs(norm - prev) <= 1e-14 * norm && change <= 1e-13) {
      rate = norm;
      return x;
    }
    prev = norm;
  }
  rate = prev;
  return x;
}

}  // namespace

EssentialValues eval_essential(const GenFunSystem& sys, double z, const EvalOptions& opt) {
  EssentialValues out;
  out.y.assign(sys.size, 0.0);
  if (z < 0) throw ConfigurationError("genfun-engine", "z must be >= 0");
  if (opt.kleene) {
    std::vector<double> next(sys.size, 0.0);
    for (int it = 0; it < opt.kleene_cap; ++it) {
      double worst = 0.0, scale = 1.0;
      for (int t : sys.essential) {
        next[t] = sys.pol(t, z, out.y);
        worst = std::max(worst, std::abs(next[t] - out.y[t]));
        scale = std::max(scale, next[t]);
        if (next[t] > opt.divergence_bound) {
          out.reason = "value exceeded the divergence bound";
          out.iterations = it + 1;
          return out;
        }
      }
      for (int t : sys.essential) out.y[t] = next[t];
      if (worst <= opt.tol * scale) {
        out.converged = true;
        out.iterations = it + 1;
        return out;
      }
    }
    out.reason = "iteration cap reached";
    out.iterations = opt.kleene_cap;
    return out;
  }
  std::vector<bool> done(sys.size, false);
  out.converged = solve_blocks(sys, z, out.y, done, opt, out.iterations, out.reason);
  return out;
}

Eigen::MatrixXd essential_jacobian(const GenFunSystem& sys, double z, const std::vector<double>& y) {
  std::vector<int> local(sys.size, -1);
  for (std::size_t i = 0; i < sys.essential.size(); ++i) local[sys.essential[i]] = static_cast<int>(i);
  return block_jacobian(sys, z, y, sys.essential, local);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double r = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
  return r;
}

RadiusResult find_R(const GenFunSystem& sys, double z_max) {
  RadiusResult res;
  auto ok = [&](double z) {
    auto e = eval_essential(sys, z);
    if (!e.converged) return false;
    return spectral_radius(essential_jacobian(sys, z, e.y)) <= 1.0 + 1e-9;
  };
  double lo = 0.0, hi = 1.0;
  if (ok(1.0)) {
    lo = 1.0;
    hi = 2.0;
    while (ok(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > z_max)
        throw ConfigurationError("genfun-engine", "essential system still converges at z_max = " +
                                                      std::to_string(z_max) + "; increase z_max");
    }
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
    ++res.bisection_steps;
  }
  res.lo = lo;
  res.hi = hi;
  res.R = lo;

  auto base = eval_essential(sys, lo);
  std::vector<double> y = base.y;
  std::vector<bool> done(sys.size, false);
  // Blocks whose own spectral radius is (nearly) the largest pin down R.
  std::vector<double> rho(sys.blocks.size(), 0.0);
  double top = 0.0;
  for (std::size_t b = 0; b < sys.blocks.size(); ++b) {
    std::vector<int> local(sys.size, -1);
    for (std::size_t i = 0; i < sys.blocks[b].size(); ++i) local[sys.blocks[b][i]] = static_cast<int>(i);
    rho[b] = spectral_radius(block_jacobian(sys, lo, base.y, sys.blocks[b], local));
    top = std::max(top, rho[b]);
  }
  std::vector<double> zs;
  for (std::size_t b = 0; b < sys.blocks.size(); ++b) {
    if (rho[b] < top - 1e-4) continue;
    std::vector<double> yb = base.y;
    double zb = lo;
    if (refine_fold(sys, sys.blocks[b], lo, yb, zb) && zb >= lo - 1e-7 && zb <= hi + 1e-7) {
      zs.push_back(zb);
      for (int t : downstream(sys, sys.blocks[b])) {
        y[t] = yb[t];
        done[t] = true;
      }
    }
  }
  if (!zs.empty()) {
    res.refined = true;
    res.R = *std::min_element(zs.begin(), zs.end());
    // Remaining (upstream) blocks are finite at R; solve them there.
    int iters = 0;
    std::string reason;
    EvalOptions opt;
    if (!solve_blocks(sys, res.R, y, done, opt, iters, reason)) {
      res.refined = false;
      res.R = lo;
      y = base.y;
    }
  }
  res.f_at_R = y;
  res.rho_at_R = spectral_radius(essential_jacobian(sys, res.R, y));
  return res;
}

Eigen::MatrixXd build_Q(const GenFunSystem& sys, double z, const std::vector<double>& f) {
  const int r = sys.root_count;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(r, r);
  for (int t = 0; t < r; ++t) {
    for (const auto& l : sys.linear[t]) q(t, l.u) += l.w * z;
    for (const auto& b : sys.quadratic[t]) q(t, b.u) += b.w * z * z * f[b.v];
  }
  return q;
}

bool is_irreducible(const Eigen::MatrixXd& m) {
  if (m.rows() == 1) return true;
  for (const auto& s : reach_sets(m))
    if (static_cast<Eigen::Index>(s.size()) != m.rows()) return false;
  return true;
}

PerronFrobenius pf_eigen(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0 || m.cols() != n) throw SpectralError("Perron-Frobenius analysis needs a nonempty square matrix");
  if ((m.array() < 0).any()) throw SpectralError("matrix has negative entries");
  if (!is_irreducible(m)) {
    const auto sets = reach_sets(m);
    for (int s = 0; s < n; ++s) {
      if (static_cast<int>(sets[s].size()) == n) continue;
      std::ostringstream msg;
      msg << "reducible matrix: rows {";
      for (std::size_t i = 0; i < sets[s].size(); ++i) msg << (i ? "," : "") << sets[s][i];
      msg << "} have a zero block towards columns {";
      bool first = true;
      for (int v = 0; v < n; ++v)
        if (!std::binary_search(sets[s].begin(), sets[s].end(), v)) {
          msg << (first ? "" : ",") << v;
          first = false;
        }
      msg << "}";
      throw SpectralError(msg.str());
    }
  }
  PerronFrobenius pf;
  const Eigen::MatrixXd a = m + Eigen::MatrixXd::Identity(n, n);
  double rate_w = 0.0, rate_v = 0.0;
  pf.w = power_vector(a, rate_w, pf.iterations);
  pf.v = power_vector(a.transpose(), rate_v, pf.iterations);
  pf.lambda = rate_w - 1.0;
  pf.v /= pf.v.sum();
  pf.w /= pf.v.dot(pf.w);
  return pf;
}

double lambda_at(const GenFunSystem& sys, double z) {
  auto e = eval_essential(sys, z);
  if (!e.converged) return std::numeric_limits<double>::quiet_NaN();
  return pf_eigen(build_Q(sys, z, e.y)).lambda;
}

double lambda_prime_check(const GenFunSystem& sys, double z) {
  const double h = 1e-6 * z;
  auto fp = eval_essential(sys, z + h), fm = eval_essential(sys, z - h), f0 = eval_essential(sys, z);
  if (!fp.converged || !fm.converged || !f0.converged)
    throw SpectralError("lambda'(z) check needs z inside the convergence region");
  const auto qp = build_Q(sys, z + h, fp.y), qm = build_Q(sys, z - h, fm.y);
  const double dl = (pf_eigen(qp).lambda - pf_eigen(qm).lambda) / (2 * h);
  const auto pf = pf_eigen(build_Q(sys, z, f0.y));
  const Eigen::MatrixXd dq = (qp - qm) / (2 * h);
  const double formula = pf.v.dot(dq * pf.w);
  return std::abs(formula - dl) / std::max(std::abs(dl), std::numeric_limits<double>::min());
}

std::vector<double> green_functions(const GenFunSystem& sys, double z) {
  auto e = eval_essential(sys, z);
  if (!e.converged) throw SpectralError("essential system diverges at z = " + std::to_string(z));
  const int r = sys.root_count;
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(r, r) - build_Q(sys, z, e.y);
  Eigen::VectorXd d(r);
  for (int t = 0; t < r; ++t) d(t) = sys.delta[t];
  const Eigen::VectorXd g = a.fullPivLu().solve(d);
  return {g.data(), g.data() + r};
}

Classification classify(const GenFunSystem& sys, const ClassifyOptions& opt) {
  if (!(opt.tol > 0)) throw ConfigurationError("genfun-engine", "classification tolerance must be positive");
  Classification c;
  c.tol = opt.tol;
  c.radius = find_R(sys, opt.z_max);
  c.R = c.radius.R;
  c.lambda_at_R = pf_eigen(build_Q(sys, c.R, c.radius.f_at_R)).lambda;
  if (c.lambda_at_R > 1.0 + opt.tol) {
    c.case_tag = 'a';
    // lambda increases continuously from 0, so it crosses 1 once below R.
    double lo = 0.0, hi = c.R;
    while (hi - lo > 1e-14 * c.R) {
      const double mid = 0.5 * (lo + hi);
      const double l = lambda_at(sys, mid);
      (std::isnan(l) || l >= 1.0 ? hi : lo) = mid;
      ++c.rmu_bisection_steps;
    }
    c.R_mu = 0.5 * (lo + hi);
  } else if (c.lambda_at_R >= 1.0 - opt.tol) {
    c.case_tag = 'b';
    c.R_mu = c.R;
    c.caveats.push_back("case b is a boundary case decided with tolerance " + std::to_string(opt.tol));
  } else {
    c.case_tag = 'c';
    c.R_mu = c.R;
  }
  if (!c.radius.refined) c.caveats.push_back("fold-point refinement failed; R is the bisection lower bound");
  if (!opt.irreducible)
    c.caveats.push_back("graph of types is not irreducible: local limit guarantees are not established");
  return c;
}

std::string classification_json(const Classification& c) {
  using nlohmann::json;
  json j;
  j["R"] = c.R;
  j["R_mu"] = c.R_mu;
  j["lambda_at_R"] = c.lambda_at_R;
  j["case"] = std::string(1, c.case_tag);
  j["exponent"] = c.exponent();
  j["tol"] = c.tol;
  j["certificates"] = {{"bracket", {c.radius.lo, c.radius.hi}},
                       {"bisection_steps", c.radius.bisection_steps},
                       {"rho_at_R", c.radius.rho_at_R},
                       {"fold_refined", c.radius.refined},
                       {"rmu_bisection_steps", c.rmu_bisection_steps}};
  j["caveats"] = c.caveats;
  return j.dump(2);
}

std::string lambda_grid_csv(const GenFunSystem& sys, double z_hi, int points) {
  std::ostringstream s;
  s << "z,lambda";
  for (int t : sys.essential) s << ',' << sys.names[t];
  s << '\n';
  char buf[40];
  for (int k = 1; k <= points; ++k) {
    const double z = z_hi * k / points;
    auto e = eval_essential(sys, z);
    std::snprintf(buf, sizeof buf, "%.17g", z);
    s << buf;
    const double l = e.converged ? pf_eigen(build_Q(sys, z, e.y)).lambda : std::nan("");
    std::snprintf(buf, sizeof buf, "%.17g", l);
    s << ',' << buf;
    for (int t : sys.essential) {
      std::snprintf(buf, sizeof buf, "%.17g", e.converged ? e.y[t] : std::nan(""));
      s << ',' << buf;
    }
    s << '\n';
  }
  return s.str();
}

}  // namespace cfwalk
