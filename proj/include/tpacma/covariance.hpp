#pragma once

#include <vector>

#include "tpacma/params.hpp"
#include "tpacma/recombine.hpp"
#include "tpacma/types.hpp"

namespace tpacma {

struct CovarianceState {
  Matrix C;
  Vector p_c;

  static CovarianceState identity(int n) {
    return {Matrix::Identity(n, n), Vector::Zero(n)};
  }
};

/// Threshold on alpha_s above which the evolution path is stalled:
/// (1 - (1-c_alpha)^9) (1 - (1-c_alpha)^g) alpha. g starts at 1 with the
/// first update.
double stall_threshold(long generation, const StrategyParams& params);

/// 0 if alpha_s exceeds stall_threshold(), 1 otherwise.
int stall_indicator(double alpha_s, long generation, const StrategyParams& params);

/// p_c <- (1-c_c) p_c + h sqrt(c_c (2-c_c) mu_w) <y>. C is left untouched.
CovarianceState update_path(const CovarianceState& state, const Vector& mean_step, int h_sigma,
                            const StrategyParams& params);

/// C <- (1-c_1-c_mu) C + c_1 p_c p_c^T + c_mu sum w_i y_{i:lambda} y_{i:lambda}^T,
/// followed by re-symmetrization. Expects update_path() to have run already.
CovarianceState update_covariance(const CovarianceState& state, const RankedPopulation& ranked,
                                  const std::vector<double>& weights,
                                  const StrategyParams& params);

}  // namespace tpacma
