#include "tpacma/params.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tpacma {

MuPrimeRule parse_mu_prime_rule(const std::string& name) {
  if (name == "half") return MuPrimeRule::half;
  if (name == "half_minus") return MuPrimeRule::half_minus;
  throw std::invalid_argument("unknown mu_prime_rule '" + name + "' (expected half or half_minus)");
}

std::string to_string(MuPrimeRule rule) {
  return rule == MuPrimeRule::half ? "half" : "half_minus";
}

int selected_parents(double mu_prime) {
  // Round half down: 2.5 -> 2, 2.6 -> 3.
  int mu = static_cast<int>(std::ceil(mu_prime - 0.5));
  while (mu > 1 && std::log(mu_prime + 0.5) - std::log(mu) <= 0.0) --mu;
  return mu;
}

std::vector<double> compute_weights(double mu_prime, int mu) {
  if (mu < 1) throw std::invalid_argument("compute_weights: mu must be >= 1");
  const double head = std::log(mu_prime + 0.5);
  if (!(head - std::log(mu) > 0.0)) {
    std::ostringstream msg;
    msg << "compute_weights: mu' = " << mu_prime << " with mu = " << mu
        << " gives a non-positive last weight";
    throw std::invalid_argument(msg.str());
  }
  std::vector<double> w(static_cast<std::size_t>(mu));
  for (int i = 0; i < mu; ++i) w[i] = head - std::log(i + 1.0);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& wi : w) wi /= total;
  return w;
}

double variance_effective_mass(const std::vector<double>& weights) {
  if (weights.empty()) throw std::invalid_argument("variance_effective_mass: empty weights");
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return 1.0 / sq;
}

double rank_one_rate(int n, double mu_cov) {
  return 2.0 / ((n + 1.3) * (n + 1.3) + mu_cov);
}

double rank_mu_rate(int n, double mu_cov, double c_1) {
  const double raw = 2.0 * (mu_cov - 2.0 + 1.0 / mu_cov) / ((n + 2.0) * (n + 2.0) + mu_cov);
  return std::min(raw, 1.0 - c_1);
}

void StrategyParams::validate() const {
  std::vector<std::string> problems;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  require(n >= 1, "n must be >= 1");
  require(lambda >= 2, "lambda must be >= 2");
  require(mu >= 1 && mu <= lambda, "mu must lie in [1, lambda]");
  require(mu_prime > 0.0, "mu_prime must be positive");
  require(static_cast<int>(weights.size()) == mu, "weights must have mu entries");
  if (!weights.empty()) {
    double sum = 0.0;
    bool positive = true, ordered = true;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      sum += weights[i];
      positive = positive && weights[i] > 0.0;
      if (i > 0) ordered = ordered && weights[i] <= weights[i - 1];
    }
    require(positive, "weights must be strictly positive");
    require(ordered, "weights must be non-increasing");
    require(std::abs(sum - 1.0) <= 1e-12, "weights must sum to 1");
  }
  require(mu_w >= 1.0 - 1e-12 && mu_w <= mu + 1e-12, "mu_w must lie in [1, mu]");
  require(c_c > 0.0 && c_c <= 1.0, "c_c must lie in (0, 1]");
  require(mu_cov > 0.0, "mu_cov must be positive");
  require(c_1 >= 0.0 && c_1 < 1.0, "c_1 must lie in [0, 1)");
  require(c_mu >= 0.0 && c_mu < 1.0, "c_mu must lie in [0, 1)");
  require(c_1 + c_mu <= 1.0, "c_1 + c_mu must not exceed 1");
  require(alpha_test > 0.0, "alpha_test must be positive");
  require(alpha_change >= 0.0, "alpha_change must be >= 0");
  require(beta_bias >= 0.0, "beta_bias must be >= 0");
  require(c_alpha > 0.0 && c_alpha <= 1.0, "c_alpha must lie in (0, 1]");

  if (!problems.empty()) {
    std::string msg = "invalid strategy parameters:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }
}

StrategyParams make_params(int n, const ParamOverrides& o) {
  if (n < 1) throw std::invalid_argument("dimension n must be >= 1");
  StrategyParams p;
  p.n = n;
  p.lambda = o.lambda.value_or(4 + static_cast<int>(std::floor(3.0 * std::log(n))));
  if (p.lambda < 2) throw std::invalid_argument("lambda must be >= 2");

  const double default_mu_prime =
      o.mu_prime_rule == MuPrimeRule::half ? p.lambda / 2.0 : (p.lambda - 1) / 2.0;
  p.mu_prime = o.mu_prime.value_or(default_mu_prime);
  p.mu = o.mu.value_or(selected_parents(p.mu_prime));
  if (p.mu < 1) throw std::invalid_argument("parameters yield mu < 1");
  if (p.mu > p.lambda) throw std::invalid_argument("mu must not exceed lambda");
  p.weights = compute_weights(p.mu_prime, p.mu);
  p.mu_w = variance_effective_mass(p.weights);

  p.c_c = o.c_c.value_or(4.0 / (n + 4.0));
  p.mu_cov = o.mu_cov.value_or(p.mu_w);
  p.c_1 = o.c_1.value_or(rank_one_rate(n, p.mu_cov));
  p.c_mu = o.c_mu.value_or(rank_mu_rate(n, p.mu_cov, p.c_1));

  p.alpha_test = o.alpha_test.value_or(0.5);
  p.alpha_change = o.alpha_change.value_or(0.5);
  p.beta_bias = o.beta_bias.value_or(0.0);
  p.c_alpha = o.c_alpha.value_or(0.3);

  p.validate();
  return p;
}

StrategyParams default_params(int n, std::optional<int> lambda_override) {
  ParamOverrides o;
  o.lambda = lambda_override;
  return make_params(n, o);
}

}  // namespace tpacma
