#pragma once

#include "evpca/report.hpp"

namespace evpca {

/// Experiment settings parsed from a JSON config file. Keys: name, n,
/// p, m, sigma_head, tail_decay, seed, lambdas, and optionally trials,
/// epsilons, pair_cap. `name` alone may select a preset scheme whose
/// fields individual keys then override.
struct ExperimentConfig {
  SimScheme scheme;
  SparsityGrid grid{{0.0, 1.0}};
  int trials = 100;
  std::vector<double> epsilons{0.0, 1e-3, 1e-2};
  long pair_cap = kDefaultPairCap;
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig config_from_file(const std::string& path);

}  // namespace evpca
