#include "tpacma/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tpacma {

double minus_point_coefficient(double alpha_test, const TpaVariant& variant) {
  return variant.asymmetric_minus_point ? -alpha_test / (1.0 + alpha_test) : -alpha_test;
}

TestPoints tpa_test_points(const Vector& mean, double sigma, const Vector& mean_step,
                           double alpha_test, const TpaVariant& variant) {
  const Vector shift = sigma * mean_step;
  return {mean + alpha_test * shift,
          mean + minus_point_coefficient(alpha_test, variant) * shift};
}

TpaUpdate tpa_update(const TpaState& state, double f_plus, double f_minus,
                     const StrategyParams& params) {
  if (std::isnan(f_plus) || std::isnan(f_minus))
    throw std::invalid_argument("tpa_update: NaN test value");
  TpaUpdate out;
  out.no_information = std::isinf(f_plus) && f_plus > 0 && std::isinf(f_minus) && f_minus > 0;
  const bool decrease = out.no_information || f_minus < f_plus;
  const double alpha_act =
      decrease ? -params.alpha_change + params.beta_bias : params.alpha_change;
  out.state.alpha_s = (1.0 - params.c_alpha) * state.alpha_s + params.c_alpha * alpha_act;
  out.state.last_alpha_act = alpha_act;
  out.sigma_multiplier = std::exp(out.state.alpha_s);
  return out;
}

LegacySetup salomon_legacy_params(const StrategyParams& base) {
  LegacySetup s{base, {true, true}};
  s.params.alpha_test = 0.8;
  s.params.alpha_change = std::log(1.8);
  s.params.beta_bias = 0.0;
  s.params.c_alpha = 1.0;
  s.params.validate();
  return s;
}

double expected_normal_norm(int n) {
  return std::sqrt(static_cast<double>(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
}

CsaParams default_csa_params(const StrategyParams& p) {
  CsaParams c;
  c.c_sigma = (p.mu_w + 2.0) / (p.n + p.mu_w + 3.0);
  c.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((p.mu_w - 1.0) / (p.n + 1.0)) - 1.0) + c.c_sigma;
  c.chi_n = expected_normal_norm(p.n);
  return c;
}

CsaUpdate csa_update(const CsaState& state, const Vector& mean_step, const Matrix& inv_sqrt,
                     const StrategyParams& params, const CsaParams& csa) {
  if (inv_sqrt.rows() != mean_step.size() || state.p_sigma.size() != mean_step.size())
    throw std::invalid_argument("csa_update: dimension mismatch");
  const double cs = csa.c_sigma;
  CsaUpdate out;
  out.state.p_sigma = (1.0 - cs) * state.p_sigma +
                      std::sqrt(cs * (2.0 - cs) * params.mu_w) * (inv_sqrt * mean_step);
  out.sigma_multiplier =
      std::exp((cs / csa.d_sigma) * (out.state.p_sigma.norm() / csa.chi_n - 1.0));
  return out;
}

int csa_stall_indicator(const Vector& p_sigma, long generation, const CsaParams& csa) {
  const double n = static_cast<double>(p_sigma.size());
  const double correction =
      std::sqrt(1.0 - std::pow(1.0 - csa.c_sigma, 2.0 * static_cast<double>(generation)));
  return p_sigma.norm() / correction < (1.4 + 2.0 / (n + 1.0)) * csa.chi_n ? 1 : 0;
}

}  // namespace tpacma
