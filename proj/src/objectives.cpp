#include "tpacma/objectives.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tpacma {

namespace {

double sphere(const Vector& x) { return x.squaredNorm(); }

double ellipsoid(const Vector& x, double condition) {
  const auto n = x.size();
  double f = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double exponent = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    f += std::pow(condition, exponent) * x[i] * x[i];
  }
  return f;
}

double rosenbrock(const Vector& x) {
  double f = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    f += 100.0 * a * a + b * b;
  }
  return f;
}

double rastrigin(const Vector& x) {
  double f = 10.0 * static_cast<double>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    f += x[i] * x[i] - 10.0 * std::cos(2.0 * std::numbers::pi * x[i]);
  return f;
}

}  // namespace

const std::vector<std::string>& objective_names() {
  static const std::vector<std::string> names{"sphere",    "ellipsoid",    "rosenbrock",
                                              "rastrigin", "noisy_sphere", "random_fitness"};
  return names;
}

ObjectiveKind parse_objective_kind(const std::string& name) {
  const auto& names = objective_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<ObjectiveKind>(i);
  throw std::invalid_argument("unknown objective '" + name + "'");
}

std::string to_string(ObjectiveKind kind) {
  return objective_names().at(static_cast<std::size_t>(kind));
}

double evaluate(const ObjectiveSpec& spec, const Vector& x, RandomStream& rng) {
  switch (spec.kind) {
    case ObjectiveKind::sphere:
      return sphere(x);
    case ObjectiveKind::ellipsoid:
      return ellipsoid(x, spec.condition);
    case ObjectiveKind::rosenbrock:
      return rosenbrock(x);
    case ObjectiveKind::rastrigin:
      return rastrigin(x);
    case ObjectiveKind::noisy_sphere:
      return sphere(x) * (1.0 + spec.noise_level * rng.normal());
    case ObjectiveKind::random_fitness:
      return rng.uniform();
  }
  throw std::logic_error("evaluate: unhandled objective kind");
}

Vector optimum(const ObjectiveSpec& spec) {
  if (spec.kind == ObjectiveKind::rosenbrock) return Vector::Ones(spec.n);
  return Vector::Zero(spec.n);
}

}  // namespace tpacma
