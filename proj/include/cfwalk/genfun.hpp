#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfwalk/grammar.hpp"
#include "cfwalk/step.hpp"

namespace cfwalk {

/// Pol_T(z; y) = delta_T + sum w z y_U + sum w z^2 y_V y_U, one term per
/// production.
struct GenFunSystem {
  struct Linear {
    double w;
    int u;
  };
  struct Quadratic {
    double w;
    int v;
    int u;
  };

  int size = 0;
  std::vector<std::string> names;
  std::vector<double> delta;
  std::vector<std::vector<Linear>> linear;
  std::vector<std::vector<Quadratic>> quadratic;
  /// V_0 variables (indices 0 .. root_count-1) and the essential ones.
  int root_count = 0;
  std::vector<int> essential;
  /// Strong components of the essential variables, dependencies first.
  std::vector<std::vector<int>> blocks;

  double pol(int t, double z, const std::vector<double>& y) const;
};

GenFunSystem make_system(const Grammar& g, const StepDistribution& mu);

struct EssentialValues {
  bool converged = false;
  /// Full-length vector; only essential entries are meaningful.
  std::vector<double> y;
  int iterations = 0;
  std::string reason;
};

struct EvalOptions {
  double tol = 1e-14;
  double divergence_bound = 1e12;
  int newton_cap = 2000;
  /// Plain fixed-point iteration instead of block Newton.
  bool kleene = false;
  int kleene_cap = 1'000'000;
};

/// Least nonnegative solution of the essential subsystem at z, or
/// converged = false (DIVERGED).
EssentialValues eval_essential(const GenFunSystem& sys, double z, const EvalOptions& opt = {});

/// Jacobian of the essential subsystem at (z, y), over the essential indices.
Eigen::MatrixXd essential_jacobian(const GenFunSystem& sys, double z, const std::vector<double>& y);

double spectral_radius(const Eigen::MatrixXd& m);

struct RadiusResult {
  double R = 0.0;
  /// Bracket of the bisection on "converges with rho(J) <= 1".
  double lo = 0.0;
  double hi = 0.0;
  int bisection_steps = 0;
  double rho_at_R = 0.0;
  bool refined = false;
  std::vector<double> f_at_R;
};

/// Essential radius R. Throws ConfigurationError when no bracket is found
/// below z_max.
RadiusResult find_R(const GenFunSystem& sys, double z_max = 1e3);

/// Q(z) over V_0 given essential values at z.
Eigen::MatrixXd build_Q(const GenFunSystem& sys, double z, const std::vector<double>& f);

struct PerronFrobenius {
  double lambda = 0.0;
  /// Left and right eigenvectors with <v, 1> = <v, w> = 1.
  Eigen::VectorXd v;
  Eigen::VectorXd w;
  int iterations = 0;
};

/// Throws SpectralError when m is reducible.
PerronFrobenius pf_eigen(const Eigen::MatrixXd& m);

bool is_irreducible(const Eigen::MatrixXd& m);

/// lambda(z) = Perron root of Q(z); NaN outside the convergence region.
double lambda_at(const GenFunSystem& sys, double z);

/// |v^t Q'(z) w - lambda'(z)| / |lambda'(z)|, both by central differences.
double lambda_prime_check(const GenFunSystem& sys, double z);

/// Green functions G(x, y0 | z) for the V_0 variables, by (I - Q(z))^-1 delta.
std::vector<double> green_functions(const GenFunSystem& sys, double z);

struct Classification {
  double R = 0.0;
  double R_mu = 0.0;
  double lambda_at_R = 0.0;
  char case_tag = 'c';
  double tol = 1e-6;
  RadiusResult radius;
  int rmu_bisection_steps = 0;
  std::vector<std::string> caveats;

  /// 0 for a pole, 1/2 for case b, 3/2 for case c.
  double exponent() const { return case_tag == 'a' ? 0.0 : case_tag == 'b' ? 0.5 : 1.5; }
};

struct ClassifyOptions {
  double tol = 1e-6;
  double z_max = 1e3;
  /// Graph of types strongly connected; otherwise a caveat is recorded.
  bool irreducible = true;
};

Classification classify(const GenFunSystem& sys, const ClassifyOptions& opt = {});

std::string classification_json(const Classification& c);
/// Rows z, lambda(z), f_V(z) on `points` equally spaced z in (0, z_hi].
std::string lambda_grid_csv(const GenFunSystem& sys, double z_hi, int points);

}  // namespace cfwalk
