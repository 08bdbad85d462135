#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace tpacma {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One stream per run. Every stochastic component (sampling, noisy
// objectives, restart means) draws from the stream it is handed, so a run
// is fully determined by its seed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace tpacma
