#pragma once

#include <string>
#include <vector>

#include "tpacma/types.hpp"

namespace tpacma {

enum class ObjectiveKind { sphere, ellipsoid, rosenbrock, rastrigin, noisy_sphere, random_fitness };

ObjectiveKind parse_objective_kind(const std::string& name);
std::string to_string(ObjectiveKind kind);
const std::vector<std::string>& objective_names();

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::sphere;
  int n = 1;
  double noise_level = 0.0;  // noisy_sphere: relative std-dev of the multiplicative noise
  double condition = 1e6;    // ellipsoid: ratio of largest to smallest axis weight

  bool is_noisy() const {
    return kind == ObjectiveKind::noisy_sphere || kind == ObjectiveKind::random_fitness;
  }
};

/// Objective value at x. Only noisy_sphere and random_fitness draw from rng.
double evaluate(const ObjectiveSpec& spec, const Vector& x, RandomStream& rng);

/// Location of the global minimum (value 0) of the noiseless kinds.
Vector optimum(const ObjectiveSpec& spec);

}  // namespace tpacma
