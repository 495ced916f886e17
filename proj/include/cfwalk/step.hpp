#pragma once

#include <map>
#include <string>
#include <vector>

#include "cfwalk/alphabet.hpp"

namespace cfwalk {

/// Weights mu(a) of a nearest-neighbour random walk, indexed by label.
struct StepDistribution {
  std::vector<double> weights;

  double operator[](Label a) const { return weights[a]; }
  std::size_t size() const noexcept { return weights.size(); }

  static StepDistribution uniform(const Alphabet& alphabet);
  /// Every symbol of the alphabet must be named exactly once.
  static StepDistribution from_names(const Alphabet& alphabet, const std::map<std::string, double>& named);
};

/// Positive weights for every label, summing to 1 within 1e-12. Throws
/// ConfigurationError otherwise.
void validate_step_distribution(const Alphabet& alphabet, const StepDistribution& mu);

}  // namespace cfwalk
