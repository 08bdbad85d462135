#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tpacma {

// How the weight-shape parameter mu' is derived from lambda.
//   half        mu' = lambda / 2        (default)
//   half_minus  mu' = (lambda - 1) / 2
enum class MuPrimeRule { half, half_minus };

MuPrimeRule parse_mu_prime_rule(const std::string& name);
std::string to_string(MuPrimeRule rule);

/// All strategy constants of the CMA-ES with two-point step-size adaptation.
///
/// Instances are immutable once built by default_params() and may be shared
/// between concurrent runs.
struct StrategyParams {
  int n = 0;
  int lambda = 0;
  double mu_prime = 0.0;
  int mu = 0;
  std::vector<double> weights;
  double mu_w = 0.0;

  double c_c = 0.0;
  double mu_cov = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;

  // Two-point adaptation.
  double alpha_test = 0.5;    // test width alpha'
  double alpha_change = 0.5;  // change factor alpha
  double beta_bias = 0.0;     // update bias beta
  double c_alpha = 0.3;       // smoothing constant

  /// Throws std::invalid_argument listing every violated invariant.
  void validate() const;
};

/// Optional user overrides applied on top of the defaults. Fields that
/// determine other defaults (lambda, mu_prime, mu, mu_cov) are applied first
/// so the dependent constants follow them; the learning rates and the TPA
/// constants are taken verbatim and validated, never clamped.
struct ParamOverrides {
  std::optional<int> lambda;
  std::optional<double> mu_prime;
  std::optional<int> mu;
  std::optional<double> c_c;
  std::optional<double> mu_cov;
  std::optional<double> c_1;
  std::optional<double> c_mu;
  std::optional<double> alpha_test;
  std::optional<double> alpha_change;
  std::optional<double> beta_bias;
  std::optional<double> c_alpha;
  MuPrimeRule mu_prime_rule = MuPrimeRule::half;
};

StrategyParams default_params(int n, std::optional<int> lambda_override = std::nullopt);
StrategyParams make_params(int n, const ParamOverrides& overrides);

/// Nearest integer to mu', ties going to the smaller integer, then lowered
/// until the last weight ln(mu'+0.5) - ln(mu) is positive.
int selected_parents(double mu_prime);

/// Log-linear recombination weights, normalized to sum to one.
std::vector<double> compute_weights(double mu_prime, int mu);

/// 1 / sum(w_i^2) for weights summing to one.
double variance_effective_mass(const std::vector<double>& weights);

/// Rank-one learning rate for dimension n and mixing number mu_cov.
double rank_one_rate(int n, double mu_cov);

/// Rank-mu learning rate, clamped to 1 - c_1.
double rank_mu_rate(int n, double mu_cov, double c_1);

}  // namespace tpacma
