#include "tpacma/recombine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tpacma {

RankedPopulation rank(std::vector<Offspring> members, std::vector<double> fitness) {
  if (members.size() != fitness.size())
    throw std::invalid_argument("rank: fitness count does not match population size");
  for (std::size_t k = 0; k < fitness.size(); ++k)
    if (std::isnan(fitness[k]))
      throw std::invalid_argument("rank: NaN fitness at index " + std::to_string(k));

  RankedPopulation r;
  r.order.resize(members.size());
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](int a, int b) { return fitness[a] < fitness[b]; });
  r.members = std::move(members);
  r.fitness = std::move(fitness);
  return r;
}

Vector weighted_mean_step(const RankedPopulation& ranked, const std::vector<double>& weights) {
  if (weights.empty() || static_cast<int>(weights.size()) > ranked.size())
    throw std::invalid_argument("weighted_mean_step: need 1 <= mu <= lambda");
  Vector step = Vector::Zero(ranked.ranked(0).y.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    step += weights[i] * ranked.ranked(static_cast<int>(i)).y;
  return step;
}

Vector update_mean(const Vector& mean, double sigma, const Vector& mean_step) {
  return mean + sigma * mean_step;
}

Vector weighted_mean_of_solutions(const RankedPopulation& ranked,
                                  const std::vector<double>& weights) {
  Vector m = Vector::Zero(ranked.ranked(0).x.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    m += weights[i] * ranked.ranked(static_cast<int>(i)).x;
  return m;
}

}  // namespace tpacma
