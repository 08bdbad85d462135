#include "tpacma/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace tpacma {

double stall_threshold(long generation, const StrategyParams& params) {
  if (generation < 1) throw std::invalid_argument("stall_threshold: generation must be >= 1");
  const double keep = 1.0 - params.c_alpha;
  return (1.0 - std::pow(keep, 9)) * (1.0 - std::pow(keep, static_cast<double>(generation))) *
         params.alpha_change;
}

int stall_indicator(double alpha_s, long generation, const StrategyParams& params) {
  return alpha_s > stall_threshold(generation, params) ? 0 : 1;
}

CovarianceState update_path(const CovarianceState& state, const Vector& mean_step, int h_sigma,
                            const StrategyParams& params) {
  CovarianceState out = state;
  const double cc = params.c_c;
  out.p_c = (1.0 - cc) * state.p_c;
  if (h_sigma != 0) out.p_c += std::sqrt(cc * (2.0 - cc) * params.mu_w) * mean_step;
  return out;
}

CovarianceState update_covariance(const CovarianceState& state, const RankedPopulation& ranked,
                                  const std::vector<double>& weights,
                                  const StrategyParams& params) {
  const Eigen::Index n = state.C.rows();
  Matrix rank_mu = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const Vector& y = ranked.ranked(static_cast<int>(i)).y;
    rank_mu.noalias() += weights[i] * (y * y.transpose());
  }
  CovarianceState out;
  out.p_c = state.p_c;
  out.C = (1.0 - params.c_1 - params.c_mu) * state.C +
          params.c_1 * (state.p_c * state.p_c.transpose()) + params.c_mu * rank_mu;
  out.C = 0.5 * (out.C + out.C.transpose()).eval();
  return out;
}

}  // namespace tpacma
