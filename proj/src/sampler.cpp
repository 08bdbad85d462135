#include "tpacma/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace tpacma {

Matrix CovarianceFactor::reconstruct() const {
  return basis * scales.array().square().matrix().asDiagonal() * basis.transpose();
}

CovarianceFactor decompose(const Matrix& cov, bool with_inv_sqrt) {
  if (cov.rows() != cov.cols() || cov.rows() == 0)
    throw std::invalid_argument("decompose: covariance must be a non-empty square matrix");
  if (!cov.allFinite()) throw std::domain_error("decompose: covariance has non-finite entries");
  const double scale = std::max(cov.cwiseAbs().maxCoeff(), 1e-300);
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("decompose: covariance is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("decompose: eigendecomposition did not converge");

  Vector eigenvalues = solver.eigenvalues();
  const double largest = eigenvalues.maxCoeff();
  if (!(largest > 0.0)) throw std::domain_error("decompose: covariance has no positive eigenvalue");

  CovarianceFactor f;
  const double floor = kEigenvalueFloor * largest;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i] < floor) {
      eigenvalues[i] = floor;
      f.repaired = true;
    }
  }
  f.basis = solver.eigenvectors();
  f.scales = eigenvalues.cwiseSqrt();
  if (with_inv_sqrt)
    f.inv_sqrt = f.basis * f.scales.cwiseInverse().asDiagonal() * f.basis.transpose();
  return f;
}

std::vector<Offspring> sample_population(const Vector& mean, double sigma,
                                         const CovarianceFactor& factor, int lambda,
                                         RandomStream& rng) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sample_population: sigma must be positive");
  if (lambda < 2) throw std::invalid_argument("sample_population: lambda must be >= 2");
  if (mean.size() != factor.dim())
    throw std::invalid_argument("sample_population: dimension mismatch");

  const Matrix bd = factor.basis * factor.scales.asDiagonal();
  std::vector<Offspring> out(static_cast<std::size_t>(lambda));
  Vector z(mean.size());
  for (auto& child : out) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    child.y = bd * z;
    child.x = mean + sigma * child.y;
  }
  return out;
}

}  // namespace tpacma
