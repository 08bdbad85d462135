#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpacma/covariance.hpp"
#include "tpacma/objectives.hpp"
#include "tpacma/params.hpp"
#include "tpacma/recombine.hpp"
#include "tpacma/sampler.hpp"
#include "tpacma/stepsize.hpp"
#include "tpacma/types.hpp"

namespace tpacma {

enum class Controller { tpa, tpa_legacy, csa };

Controller parse_controller(const std::string& name);
std::string to_string(Controller c);

enum class TerminationReason {
  none,
  target_f,
  max_evals,
  max_generations,
  tol_x,
  tol_fun,
  sigma_min,
  sigma_max,
  axis_ratio,
  failed_evaluations,
  numerical_error,
};

std::string to_string(TerminationReason r);

// A threshold of 0 (or infinity for the upper bounds) disables the test.
struct TerminationCriteria {
  long max_evals = 100000;
  long max_generations = std::numeric_limits<long>::max();
  double target_f = -std::numeric_limits<double>::infinity();
  double tol_x = 1e-12;
  double tol_fun = 1e-12;
  double sigma_min_ratio = 0.0;  // relative to the initial sigma
  double sigma_max_ratio = std::numeric_limits<double>::infinity();
  double max_axis_ratio = 1e7;

  void validate() const;
};

struct RunConfig {
  int n = 0;
  Vector initial_mean;
  double initial_sigma = 1.0;
  Controller controller = Controller::tpa;
  ParamOverrides overrides;
  std::optional<CsaParams> csa;  // defaults derived from params when absent
  TerminationCriteria termination;
  std::uint64_t seed = 1;

  void validate() const;
};

/// One trace row per completed generation.
struct RunRecord {
  long generation = 0;
  long evals = 0;
  double best_f = 0.0;
  double sigma = 0.0;
  double alpha_s = 0.0;
  double axis_ratio = 0.0;
  double trace_C = 0.0;
};

struct EvolutionState {
  Vector m;
  double sigma = 0.0;
  CovarianceState cov;
  CovarianceFactor factor;  // decomposition of cov.C
  TpaState tpa;
  CsaState csa;
  long g = 0;      // completed generations
  long evals = 0;  // objective evaluations consumed
  Vector best_x;
  double best_f = std::numeric_limits<double>::infinity();
};

/// Raised when a generation cannot be completed: too many failed
/// evaluations or a non-finite step-size or covariance.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(TerminationReason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}
  TerminationReason reason() const { return reason_; }

 private:
  TerminationReason reason_;
};

/// Ask/tell driver for a single run.
///
/// A generation takes one ask/tell round in CSA mode and two in TPA mode:
/// the first ask() returns the lambda candidates; after they are told, the
/// next ask() returns the two test points {plus, minus}, and telling their
/// values completes the generation. Failed evaluations may be reported as
/// NaN or +infinity; NaN is mapped to +infinity.
class Optimizer {
 public:
  enum class Phase { population, test_points };

  Optimizer(StrategyParams params, Controller controller, Vector initial_mean,
            double initial_sigma, RandomStream rng, std::optional<CsaParams> csa = std::nullopt);

  const std::vector<Vector>& ask();
  void tell(std::span<const double> fitness);

  Phase phase() const { return phase_; }
  bool generation_complete() const { return phase_ == Phase::population && asked_.empty(); }
  int evaluations_per_generation() const;

  const EvolutionState& state() const { return state_; }
  const StrategyParams& params() const { return params_; }
  const TpaVariant& variant() const { return variant_; }
  Controller controller() const { return controller_; }
  RunRecord record() const;

  /// Evaluation index (1-based) at which best_f first dropped below
  /// watch_target(); empty until then.
  void watch_target(double target) { target_ = target; }
  std::optional<long> evals_at_target() const { return evals_at_target_; }

  /// Selection and mean shift of the most recent generation.
  const RankedPopulation& last_ranked() const { return ranked_; }
  const Vector& last_mean_step() const { return mean_step_; }

  /// Best fitness of each ranked population so far, newest last.
  const std::vector<double>& generation_best() const { return generation_best_; }
  double last_population_range() const { return last_range_; }

  RandomStream& rng() { return rng_; }

 private:
  void note_evaluations(std::span<const Vector> points, std::span<const double> values);
  void finish_generation(int h_sigma);

  StrategyParams params_;
  Controller controller_;
  TpaVariant variant_;
  CsaParams csa_;
  RandomStream rng_;
  EvolutionState state_;

  Phase phase_ = Phase::population;
  std::vector<Offspring> offspring_;
  std::vector<Vector> asked_;
  RankedPopulation ranked_;
  Vector mean_step_;
  Vector old_mean_;

  double target_ = -std::numeric_limits<double>::infinity();
  std::optional<long> evals_at_target_;
  std::vector<double> generation_best_;
  double last_range_ = std::numeric_limits<double>::infinity();
};

using Objective = std::function<double(const Vector&, RandomStream&)>;

Objective make_objective(const ObjectiveSpec& spec);

struct RunResult {
  Vector best_x;
  double best_f = std::numeric_limits<double>::infinity();
  TerminationReason reason = TerminationReason::none;
  std::string message;
  std::vector<RunRecord> trace;
  long evals = 0;
  long generations = 0;
  std::optional<long> evals_to_target;
  Vector final_mean;
  double final_sigma = 0.0;
  std::vector<int> lambdas;  // population size of each restart segment
};

/// Params for a configuration, including the legacy-mode substitutions.
StrategyParams resolve_params(const RunConfig& config, std::optional<int> lambda = std::nullopt);

/// Generations until a TerminationCriteria fires. Deterministic given the seed.
RunResult run(const RunConfig& config, const Objective& objective);
RunResult run(const RunConfig& config, const ObjectiveSpec& objective);

struct RestartPolicy {
  int max_restarts = 0;
  double lambda_multiplier = 2.0;
  // When both are set, each restart draws its mean uniformly in the box;
  // otherwise the initial mean is reused.
  std::optional<Vector> lower;
  std::optional<Vector> upper;
};

/// Restarts with increasing population size after every termination that is
/// neither target, budget nor generation limit. The budget is shared.
RunResult run_with_restarts(const RunConfig& config, const Objective& objective,
                            const RestartPolicy& policy);

}  // namespace tpacma
