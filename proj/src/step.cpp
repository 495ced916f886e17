#include "cfwalk/step.hpp"

#include <cmath>

#include "cfwalk/errors.hpp"

namespace cfwalk {

StepDistribution StepDistribution::uniform(const Alphabet& alphabet) {
  if (alphabet.size() == 0) throw ConfigurationError("genfun-engine", "empty alphabet");
  return {std::vector<double>(alphabet.size(), 1.0 / static_cast<double>(alphabet.size()))};
}

StepDistribution StepDistribution::from_names(const Alphabet& alphabet,
                                              const std::map<std::string, double>& named) {
  StepDistribution mu{std::vector<double>(alphabet.size(), 0.0)};
  std::vector<bool> seen(alphabet.size(), false);
  for (const auto& [name, w] : named) {
    if (!alphabet.contains(name))
      throw ConfigurationError("genfun-engine", "step weight for unknown label '" + name + "'");
    const Label a = alphabet.find(name);
    mu.weights[a] = w;
    seen[a] = true;
  }
  for (Label a = 0; a < alphabet.size(); ++a)
    if (!seen[a])
      throw ConfigurationError("genfun-engine", "no step weight for label '" + alphabet.name(a) + "'");
  validate_step_distribution(alphabet, mu);
  return mu;
}

void validate_step_distribution(const Alphabet& alphabet, const StepDistribution& mu) {
  if (mu.size() != alphabet.size())
    throw ConfigurationError("genfun-engine", "step distribution has " + std::to_string(mu.size()) +
                                                  " weights for " + std::to_string(alphabet.size()) +
                                                  " labels");
  double total = 0.0;
  for (Label a = 0; a < alphabet.size(); ++a) {
    if (!(mu[a] > 0.0) || !std::isfinite(mu[a]))
      throw ConfigurationError("genfun-engine",
                               "step weight of '" + alphabet.name(a) + "' must be positive");
    total += mu[a];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigurationError("genfun-engine", "step weights sum to " + std::to_string(total) + ", not 1");
}

}  // namespace cfwalk
