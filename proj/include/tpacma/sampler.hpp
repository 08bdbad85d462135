#pragma once

#include <vector>

#include "tpacma/types.hpp"

namespace tpacma {

// Eigendecomposition C = B diag(scales^2) B^T. inv_sqrt is only filled in
// when requested (the CSA baseline needs C^{-1/2}; TPA does not).
struct CovarianceFactor {
  Matrix basis;
  Vector scales;
  Matrix inv_sqrt;
  bool repaired = false;  // some eigenvalue was raised to the floor

  int dim() const { return static_cast<int>(scales.size()); }
  Matrix reconstruct() const;
  double axis_ratio() const { return scales.maxCoeff() / scales.minCoeff(); }
};

// Eigenvalues below this fraction of the largest one are raised to it.
inline constexpr double kEigenvalueFloor = 1e-14;

/// Symmetric eigendecomposition with eigenvalue flooring. Throws
/// std::domain_error on non-finite entries and std::invalid_argument on a
/// non-square or asymmetric input.
CovarianceFactor decompose(const Matrix& cov, bool with_inv_sqrt = false);

struct Offspring {
  Vector y;  // ~ N(0, C)
  Vector x;  // m + sigma * y
};

/// Draws lambda candidates x_k = m + sigma * y_k with y_k = B D z_k.
/// z vectors are drawn offspring-major, coordinate-minor.
std::vector<Offspring> sample_population(const Vector& mean, double sigma,
                                         const CovarianceFactor& factor, int lambda,
                                         RandomStream& rng);

}  // namespace tpacma
