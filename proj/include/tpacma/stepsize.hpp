#pragma once

#include <utility>

#include "tpacma/params.hpp"
#include "tpacma/types.hpp"

namespace tpacma {

// ---------------------------------------------------------------------------
// Two-point step-size adaptation (TPA)
//
// After the mean update, two test points are evaluated along the realized
// mean shift, symmetric about the new mean. If the outer point (+) is not
// worse than the inner point (-), the signal favours a larger step-size.
// The signal is smoothed exponentially and sigma is multiplied by
// exp(alpha_s).
// ---------------------------------------------------------------------------

struct TpaState {
  double alpha_s = 0.0;
  double last_alpha_act = 0.0;  // signal of the most recent update
};

/// Switches that recover the original two-point scheme of Salomon.
struct TpaVariant {
  bool asymmetric_minus_point = false;  // minus point at -alpha'/(1+alpha')
  bool mean_uses_new_sigma = false;     // m = m_old + sigma_new <y>
};

struct TestPoints {
  Vector plus;
  Vector minus;
};

/// (m + alpha' sigma <y>, m - alpha' sigma <y>), or with the minus offset
/// alpha'/(1+alpha') when the variant asks for it.
TestPoints tpa_test_points(const Vector& mean, double sigma, const Vector& mean_step,
                           double alpha_test, const TpaVariant& variant = {});

/// Offset coefficient of the minus point in units of sigma <y>.
double minus_point_coefficient(double alpha_test, const TpaVariant& variant);

struct TpaUpdate {
  TpaState state;
  double sigma_multiplier = 1.0;
  bool no_information = false;  // both test values were +infinity
};

/// alpha_act = -alpha + beta if f_minus < f_plus, else +alpha. When neither
/// test point could be evaluated the decrease branch is taken and flagged.
/// The caller applies sigma *= sigma_multiplier.
TpaUpdate tpa_update(const TpaState& state, double f_plus, double f_minus,
                     const StrategyParams& params);

struct LegacySetup {
  StrategyParams params;
  TpaVariant variant;
};

/// alpha' = 0.8, alpha = ln 1.8, beta = 0, c_alpha = 1, asymmetric minus
/// point and mean update with the new step-size.
LegacySetup salomon_legacy_params(const StrategyParams& base);

// ---------------------------------------------------------------------------
// Cumulative step-size adaptation (CSA), the baseline controller.
// ---------------------------------------------------------------------------

struct CsaParams {
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double chi_n = 0.0;  // approximation of E||N(0,I)||
};

CsaParams default_csa_params(const StrategyParams& params);

/// sqrt(n) (1 - 1/(4n) + 1/(21 n^2)).
double expected_normal_norm(int n);

struct CsaState {
  Vector p_sigma;
};

struct CsaUpdate {
  CsaState state;
  double sigma_multiplier = 1.0;
};

/// p_sigma <- (1-c_s) p_sigma + sqrt(c_s (2-c_s) mu_w) C^{-1/2} <y>,
/// multiplier = exp((c_s/d_s)(||p_sigma|| / chi_n - 1)).
CsaUpdate csa_update(const CsaState& state, const Vector& mean_step, const Matrix& inv_sqrt,
                     const StrategyParams& params, const CsaParams& csa);

/// Stall indicator for the covariance path in CSA mode:
/// 1 iff ||p_sigma|| / sqrt(1 - (1-c_s)^(2g)) < (1.4 + 2/(n+1)) chi_n.
int csa_stall_indicator(const Vector& p_sigma, long generation, const CsaParams& csa);

}  // namespace tpacma
