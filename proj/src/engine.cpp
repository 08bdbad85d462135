#include "tpacma/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tpacma {

Controller parse_controller(const std::string& name) {
  if (name == "tpa") return Controller::tpa;
  if (name == "tpa_legacy") return Controller::tpa_legacy;
  if (name == "csa") return Controller::csa;
  throw std::invalid_argument("unknown controller '" + name + "'");
}

std::string to_string(Controller c) {
  switch (c) {
    case Controller::tpa: return "tpa";
    case Controller::tpa_legacy: return "tpa_legacy";
    case Controller::csa: return "csa";
  }
  return "?";
}

std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::none: return "none";
    case TerminationReason::target_f: return "target_f";
    case TerminationReason::max_evals: return "max_evals";
    case TerminationReason::max_generations: return "max_generations";
    case TerminationReason::tol_x: return "tol_x";
    case TerminationReason::tol_fun: return "tol_fun";
    case TerminationReason::sigma_min: return "sigma_min";
    case TerminationReason::sigma_max: return "sigma_max";
    case TerminationReason::axis_ratio: return "axis_ratio";
    case TerminationReason::failed_evaluations: return "failed_evaluations";
    case TerminationReason::numerical_error: return "numerical_error";
  }
  return "?";
}

void TerminationCriteria::validate() const {
  std::vector<std::string> problems;
  if (max_evals < 0) problems.push_back("max_evals must be >= 0");
  if (max_generations < 0) problems.push_back("max_generations must be >= 0");
  if (std::isnan(target_f)) problems.push_back("target_f must not be NaN");
  if (!(tol_x >= 0.0)) problems.push_back("tol_x must be >= 0");
  if (!(tol_fun >= 0.0)) problems.push_back("tol_fun must be >= 0");
  if (!(sigma_min_ratio >= 0.0)) problems.push_back("sigma_min_ratio must be >= 0");
  if (!(sigma_max_ratio > sigma_min_ratio)) problems.push_back("sigma_max_ratio must exceed sigma_min_ratio");
  if (!(max_axis_ratio > 1.0)) problems.push_back("max_axis_ratio must exceed 1");
  if (!problems.empty()) {
    std::string msg = "invalid termination criteria:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }
}

void RunConfig::validate() const {
  if (n < 1) throw std::invalid_argument("run config: n must be >= 1");
  if (initial_mean.size() != n)
    throw std::invalid_argument("run config: initial mean has dimension " +
                                std::to_string(initial_mean.size()) + ", expected " +
                                std::to_string(n));
  if (!initial_mean.allFinite()) throw std::invalid_argument("run config: initial mean is not finite");
  if (!(initial_sigma > 0.0) || !std::isfinite(initial_sigma))
    throw std::invalid_argument("run config: initial sigma must be positive and finite");
  termination.validate();
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

Optimizer::Optimizer(StrategyParams params, Controller controller, Vector initial_mean,
                     double initial_sigma, RandomStream rng, std::optional<CsaParams> csa)
    : params_(std::move(params)), controller_(controller), rng_(std::move(rng)) {
  params_.validate();
  if (initial_mean.size() != params_.n)
    throw std::invalid_argument("Optimizer: initial mean dimension does not match params");
  if (!(initial_sigma > 0.0) || !std::isfinite(initial_sigma))
    throw std::invalid_argument("Optimizer: initial sigma must be positive and finite");
  if (controller_ == Controller::tpa_legacy) variant_ = TpaVariant{true, true};
  csa_ = csa.value_or(default_csa_params(params_));

  state_.m = std::move(initial_mean);
  state_.sigma = initial_sigma;
  state_.cov = CovarianceState::identity(params_.n);
  state_.factor = decompose(state_.cov.C, controller_ == Controller::csa);
  state_.csa.p_sigma = Vector::Zero(params_.n);
  state_.best_x = state_.m;
}

int Optimizer::evaluations_per_generation() const {
  return params_.lambda + (controller_ == Controller::csa ? 0 : 2);
}

const std::vector<Vector>& Optimizer::ask() {
  if (phase_ == Phase::population && asked_.empty()) {
    offspring_ = sample_population(state_.m, state_.sigma, state_.factor, params_.lambda, rng_);
    asked_.reserve(offspring_.size());
    for (const auto& o : offspring_) asked_.push_back(o.x);
  }
  return asked_;
}

void Optimizer::note_evaluations(std::span<const Vector> points, std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    ++state_.evals;
    if (values[k] < state_.best_f) {
      state_.best_f = values[k];
      state_.best_x = points[k];
    }
    if (!evals_at_target_ && values[k] < target_) evals_at_target_ = state_.evals;
  }
}

void Optimizer::tell(std::span<const double> fitness) {
  if (asked_.empty()) throw std::logic_error("Optimizer::tell called before ask");
  if (fitness.size() != asked_.size())
    throw std::invalid_argument("Optimizer::tell: expected " + std::to_string(asked_.size()) +
                                " values, got " + std::to_string(fitness.size()));

  std::vector<double> values(fitness.begin(), fitness.end());
  int failures = 0;
  for (double& v : values) {
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    if (std::isinf(v) && v > 0) ++failures;
  }
  note_evaluations(asked_, values);

  if (phase_ == Phase::population) {
    if (failures > params_.lambda - params_.mu) {
      throw RunAborted(TerminationReason::failed_evaluations,
                       std::to_string(failures) + " of " + std::to_string(params_.lambda) +
                           " evaluations failed in generation " + std::to_string(state_.g + 1));
    }
    ranked_ = rank(std::move(offspring_), std::move(values));
    generation_best_.push_back(ranked_.ranked_fitness(0));
    last_range_ = ranked_.ranked_fitness(ranked_.size() - 1) - ranked_.ranked_fitness(0);
    mean_step_ = weighted_mean_step(ranked_, params_.weights);
    old_mean_ = state_.m;
    const Vector center = update_mean(state_.m, state_.sigma, mean_step_);

    if (controller_ == Controller::csa) {
      auto upd = csa_update(state_.csa, mean_step_, state_.factor.inv_sqrt, params_, csa_);
      state_.csa = std::move(upd.state);
      state_.m = center;
      state_.sigma *= upd.sigma_multiplier;
      finish_generation(csa_stall_indicator(state_.csa.p_sigma, state_.g + 1, csa_));
      return;
    }

    if (!variant_.mean_uses_new_sigma) state_.m = center;
    auto tp = tpa_test_points(center, state_.sigma, mean_step_, params_.alpha_test, variant_);
    asked_ = {std::move(tp.plus), std::move(tp.minus)};
    phase_ = Phase::test_points;
    return;
  }

  auto upd = tpa_update(state_.tpa, values[0], values[1], params_);
  state_.tpa = upd.state;
  state_.sigma *= upd.sigma_multiplier;
  if (variant_.mean_uses_new_sigma) state_.m = update_mean(old_mean_, state_.sigma, mean_step_);
  finish_generation(stall_indicator(state_.tpa.alpha_s, state_.g + 1, params_));
}

void Optimizer::finish_generation(int h_sigma) {
  phase_ = Phase::population;
  asked_.clear();
  offspring_.clear();

  if (!(state_.sigma > 0.0) || !std::isfinite(state_.sigma)) {
    std::ostringstream msg;
    msg << "step-size became " << state_.sigma << " in generation " << state_.g + 1;
    throw RunAborted(TerminationReason::numerical_error, msg.str());
  }
  state_.cov = update_path(state_.cov, mean_step_, h_sigma, params_);
  state_.cov = update_covariance(state_.cov, ranked_, params_.weights, params_);
  if (!state_.cov.C.allFinite() || !state_.m.allFinite()) {
    throw RunAborted(TerminationReason::numerical_error,
                     "non-finite mean or covariance in generation " + std::to_string(state_.g + 1));
  }
  try {
    state_.factor = decompose(state_.cov.C, controller_ == Controller::csa);
  } catch (const std::exception& e) {
    throw RunAborted(TerminationReason::numerical_error, e.what());
  }
  if (state_.factor.repaired) {
    Matrix fixed = state_.factor.reconstruct();
    state_.cov.C = 0.5 * (fixed + fixed.transpose());
  }
  ++state_.g;
}

RunRecord Optimizer::record() const {
  RunRecord r;
  r.generation = state_.g;
  r.evals = state_.evals;
  r.best_f = state_.best_f;
  r.sigma = state_.sigma;
  r.alpha_s = state_.tpa.alpha_s;
  r.axis_ratio = state_.factor.axis_ratio();
  r.trace_C = state_.cov.C.trace();
  return r;
}

// ---------------------------------------------------------------------------
// Run loops
// ---------------------------------------------------------------------------

Objective make_objective(const ObjectiveSpec& spec) {
  return [spec](const Vector& x, RandomStream& rng) { return evaluate(spec, x, rng); };
}

StrategyParams resolve_params(const RunConfig& config, std::optional<int> lambda) {
  ParamOverrides o = config.overrides;
  if (lambda) o.lambda = lambda;
  StrategyParams p = make_params(config.n, o);
  if (config.controller == Controller::tpa_legacy) p = salomon_legacy_params(p).params;
  return p;
}

namespace {

struct SegmentStart {
  long evals = 0;
  long generations = 0;
  double best_f = std::numeric_limits<double>::infinity();
};

double coordinate_spread(const EvolutionState& s) {
  return s.sigma * std::sqrt(s.cov.C.diagonal().maxCoeff());
}

// Runs one optimizer until a criterion fires; evaluation and generation
// counts in the trace continue from `start`.
RunResult run_segment(Optimizer& opt, const RunConfig& config, const Objective& objective,
                      const SegmentStart& start) {
  const TerminationCriteria& term = config.termination;
  opt.watch_target(term.target_f);
  const long history = 10 + static_cast<long>(std::ceil(30.0 * opt.params().n / opt.params().lambda));

  RunResult res;
  auto stop = [&](TerminationReason r) { res.reason = r; };

  if (term.tol_x > 0.0 && coordinate_spread(opt.state()) < term.tol_x) stop(TerminationReason::tol_x);

  std::vector<double> values;
  while (res.reason == TerminationReason::none) {
    if (start.evals + opt.state().evals + opt.evaluations_per_generation() > term.max_evals) {
      stop(TerminationReason::max_evals);
      break;
    }
    if (start.generations + opt.state().g >= term.max_generations) {
      stop(TerminationReason::max_generations);
      break;
    }
    try {
      do {
        const auto& points = opt.ask();
        values.clear();
        for (const auto& x : points) values.push_back(objective(x, opt.rng()));
        opt.tell(values);
      } while (!opt.generation_complete());
    } catch (const RunAborted& e) {
      res.message = e.what();
      stop(e.reason());
      break;
    }

    RunRecord row = opt.record();
    row.generation += start.generations;
    row.evals += start.evals;
    row.best_f = std::min(row.best_f, start.best_f);
    res.trace.push_back(row);

    const EvolutionState& s = opt.state();
    if (s.best_f < term.target_f) {
      stop(TerminationReason::target_f);
    } else if (term.tol_x > 0.0 && coordinate_spread(s) < term.tol_x) {
      stop(TerminationReason::tol_x);
    } else if (s.sigma < term.sigma_min_ratio * config.initial_sigma) {
      stop(TerminationReason::sigma_min);
    } else if (s.sigma > term.sigma_max_ratio * config.initial_sigma) {
      stop(TerminationReason::sigma_max);
    } else if (s.factor.axis_ratio() > term.max_axis_ratio) {
      stop(TerminationReason::axis_ratio);
    } else if (term.tol_fun > 0.0 && s.g >= history) {
      const auto& best = opt.generation_best();
      auto [lo, hi] = std::minmax_element(best.end() - history, best.end());
      if (*hi - *lo < term.tol_fun && opt.last_population_range() < term.tol_fun)
        stop(TerminationReason::tol_fun);
    }
  }

  const EvolutionState& s = opt.state();
  res.best_x = s.best_x;
  res.best_f = s.best_f;
  res.evals = start.evals + s.evals;
  res.generations = start.generations + s.g;
  if (auto at = opt.evals_at_target()) res.evals_to_target = start.evals + *at;
  res.final_mean = s.m;
  res.final_sigma = s.sigma;
  return res;
}

}  // namespace

RunResult run(const RunConfig& config, const Objective& objective) {
  return run_with_restarts(config, objective, RestartPolicy{});
}

RunResult run(const RunConfig& config, const ObjectiveSpec& objective) {
  return run(config, make_objective(objective));
}

RunResult run_with_restarts(const RunConfig& config, const Objective& objective,
                            const RestartPolicy& policy) {
  config.validate();
  if (policy.max_restarts < 0) throw std::invalid_argument("restart policy: max_restarts must be >= 0");
  if (!(policy.lambda_multiplier >= 1.0))
    throw std::invalid_argument("restart policy: lambda_multiplier must be >= 1");
  const bool boxed = policy.lower && policy.upper;
  if (boxed && (policy.lower->size() != config.n || policy.upper->size() != config.n))
    throw std::invalid_argument("restart policy: bounds dimension mismatch");

  StrategyParams params = resolve_params(config);
  RandomStream rng(config.seed);
  Vector mean = config.initial_mean;

  RunResult total;
  SegmentStart start;
  for (int restart = 0;; ++restart) {
    Optimizer opt(params, config.controller, mean, config.initial_sigma, std::move(rng), config.csa);
    RunResult seg = run_segment(opt, config, objective, start);
    rng = std::move(opt.rng());

    total.trace.insert(total.trace.end(), seg.trace.begin(), seg.trace.end());
    total.lambdas.push_back(params.lambda);
    if (seg.best_f < total.best_f || total.best_x.size() == 0) {
      total.best_f = seg.best_f;
      total.best_x = seg.best_x;
    }
    if (!total.evals_to_target) total.evals_to_target = seg.evals_to_target;
    total.reason = seg.reason;
    total.message = seg.message;
    total.evals = seg.evals;
    total.generations = seg.generations;
    total.final_mean = seg.final_mean;
    total.final_sigma = seg.final_sigma;

    const bool final_reason = seg.reason == TerminationReason::target_f ||
                              seg.reason == TerminationReason::max_evals ||
                              seg.reason == TerminationReason::max_generations;
    if (final_reason || restart >= policy.max_restarts) break;

    start = {seg.evals, seg.generations, total.best_f};
    const int next_lambda =
        static_cast<int>(std::lround(policy.lambda_multiplier * params.lambda));
    params = resolve_params(config, next_lambda);
    if (boxed) {
      for (int i = 0; i < config.n; ++i) mean[i] = rng.uniform((*policy.lower)[i], (*policy.upper)[i]);
    } else {
      mean = config.initial_mean;
    }
  }
  return total;
}

}  // namespace tpacma
