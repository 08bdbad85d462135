#pragma once

#include <vector>

#include "tpacma/sampler.hpp"
#include "tpacma/types.hpp"

namespace tpacma {

/// Offspring with their fitness and the selection ranking (0-based indices
/// into members, best first). Failed evaluations are carried as +infinity.
struct RankedPopulation {
  std::vector<Offspring> members;
  std::vector<double> fitness;
  std::vector<int> order;

  const Offspring& ranked(int i) const { return members[order[i]]; }
  double ranked_fitness(int i) const { return fitness[order[i]]; }
  int size() const { return static_cast<int>(members.size()); }
};

/// Stable ascending sort by fitness; ties keep sampling order.
/// Throws std::invalid_argument on NaN fitness or size mismatch.
RankedPopulation rank(std::vector<Offspring> members, std::vector<double> fitness);

/// <y> = sum_{i<mu} w_i y_{i:lambda}.
Vector weighted_mean_step(const RankedPopulation& ranked, const std::vector<double>& weights);

/// m + sigma * <y>.
Vector update_mean(const Vector& mean, double sigma, const Vector& mean_step);

/// sum_{i<mu} w_i x_{i:lambda}; equals update_mean() when the weights sum to one.
Vector weighted_mean_of_solutions(const RankedPopulation& ranked,
                                  const std::vector<double>& weights);

}  // namespace tpacma
