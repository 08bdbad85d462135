#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "tpacma/engine.hpp"

using namespace tpacma;

namespace {

RunConfig base_config(int n, Controller controller = Controller::tpa, std::uint64_t seed = 1) {
  RunConfig c;
  c.n = n;
  c.initial_mean = Vector::Constant(n, 3.0);
  c.initial_sigma = 2.0;
  c.controller = controller;
  c.seed = seed;
  return c;
}

// Termination only by generation count.
RunConfig generations_only(RunConfig c, long generations) {
  c.termination.max_generations = generations;
  c.termination.max_evals = std::numeric_limits<long>::max();
  c.termination.tol_x = 0.0;
  c.termination.tol_fun = 0.0;
  c.termination.max_axis_ratio = std::numeric_limits<double>::infinity();
  return c;
}

// Columns that depend on the ranking decisions only.
bool same_decisions(const RunResult& a, const RunResult& b) {
  if (a.trace.size() != b.trace.size()) return false;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    const auto &x = a.trace[i], &y = b.trace[i];
    if (x.evals != y.evals || x.sigma != y.sigma || x.alpha_s != y.alpha_s ||
        x.axis_ratio != y.axis_ratio || x.trace_C != y.trace_C)
      return false;
  }
  return true;
}

double sphere(const Vector& x, RandomStream&) { return x.squaredNorm(); }

}  // namespace

TEST_CASE("one generation costs lambda + 2 evaluations with TPA, lambda with CSA") {
  for (auto [controller, cost] : {std::pair{Controller::tpa, 8}, std::pair{Controller::csa, 6}}) {
    auto p = default_params(2);
    Optimizer opt(p, controller, Vector{{1.0, 0.0}}, 0.5, RandomStream(3));
    CHECK(opt.evaluations_per_generation() == cost);
    do {
      const auto& pts = opt.ask();
      std::vector<double> f;
      for (const auto& x : pts) f.push_back(x.squaredNorm());
      opt.tell(f);
    } while (!opt.generation_complete());
    CHECK(opt.state().evals == cost);
    CHECK(opt.state().g == 1);
  }
}

TEST_CASE("ask/tell protocol") {
  auto p = default_params(4);
  Optimizer opt(p, Controller::tpa, Vector::Zero(4), 1.0, RandomStream(5));
  CHECK_THROWS_AS(opt.tell(std::vector<double>(p.lambda, 0.0)), std::logic_error);

  const auto pop = opt.ask();
  CHECK(pop.size() == static_cast<std::size_t>(p.lambda));
  CHECK(opt.ask() == pop);  // asking twice returns the same batch
  CHECK_THROWS_AS(opt.tell(std::vector<double>(3, 0.0)), std::invalid_argument);

  std::vector<double> f;
  for (const auto& x : pop) f.push_back(x.squaredNorm());
  opt.tell(f);
  CHECK(opt.phase() == Optimizer::Phase::test_points);
  CHECK_FALSE(opt.generation_complete());

  const auto tp = opt.ask();
  REQUIRE(tp.size() == 2);
  CHECK(((tp[0] + tp[1]) / 2.0 - opt.state().m).norm() < 1e-14);
  opt.tell(std::vector<double>{tp[0].squaredNorm(), tp[1].squaredNorm()});
  CHECK(opt.generation_complete());
  CHECK(opt.state().g == 1);
}

TEST_CASE("TPA mode never computes C^{-1/2}") {
  auto p = default_params(3);
  Optimizer tpa(p, Controller::tpa, Vector::Zero(3), 1.0, RandomStream(1));
  Optimizer csa(p, Controller::csa, Vector::Zero(3), 1.0, RandomStream(1));
  CHECK(tpa.state().factor.inv_sqrt.size() == 0);
  CHECK(csa.state().factor.inv_sqrt.rows() == 3);
}

TEST_CASE("with all adaptation off only the mean moves") {
  auto c = generations_only(base_config(3), 1);
  c.overrides.c_1 = 0.0;
  c.overrides.c_mu = 0.0;
  c.overrides.alpha_change = 0.0;
  auto p = resolve_params(c);
  Optimizer opt(p, Controller::tpa, c.initial_mean, c.initial_sigma, RandomStream(2));
  for (int g = 0; g < 5; ++g) {
    do {
      const auto& pts = opt.ask();
      std::vector<double> f;
      for (const auto& x : pts) f.push_back(x.squaredNorm());
      opt.tell(f);
    } while (!opt.generation_complete());
  }
  CHECK(opt.state().sigma == 2.0);
  CHECK(opt.state().tpa.alpha_s == 0.0);
  CHECK(opt.state().cov.C == Matrix::Identity(3, 3));
  CHECK(opt.state().m != c.initial_mean);
  CHECK(opt.state().g == 5);
}

TEST_CASE("run terminations") {
  SUBCASE("sphere reaches the target") {
    auto c = base_config(10);
    c.termination.max_evals = 100000;
    c.termination.target_f = 1e-10;
    auto r = run(c, ObjectiveSpec{ObjectiveKind::sphere, 10});
    CHECK(r.reason == TerminationReason::target_f);
    CHECK(r.best_f < 1e-10);
    REQUIRE(r.evals_to_target);
    CHECK(*r.evals_to_target <= r.evals);
    CHECK(r.evals < 10000);
  }
  SUBCASE("zero budget stops immediately") {
    auto c = base_config(4);
    c.termination.max_evals = 0;
    auto r = run(c, ObjectiveSpec{ObjectiveKind::sphere, 4});
    CHECK(r.reason == TerminationReason::max_evals);
    CHECK(r.evals == 0);
    CHECK(r.trace.empty());
  }
  SUBCASE("tiny initial step-size triggers tol_x") {
    auto c = base_config(4);
    c.initial_sigma = 1e-12;
    c.termination.tol_x = 1e-11;
    auto r = run(c, ObjectiveSpec{ObjectiveKind::sphere, 4});
    CHECK(r.reason == TerminationReason::tol_x);
    CHECK(r.evals == 0);
  }
  SUBCASE("budget is never exceeded") {
    auto c = base_config(5);
    c.termination.max_evals = 1000;
    auto r = run(c, ObjectiveSpec{ObjectiveKind::rosenbrock, 5});
    CHECK(r.reason == TerminationReason::max_evals);
    CHECK(r.evals <= 1000);
    CHECK(r.evals > 1000 - 10);
  }
  SUBCASE("flat function triggers tol_fun") {
    auto r = run(base_config(3), [](const Vector&, RandomStream&) { return 1.0; });
    CHECK(r.reason == TerminationReason::tol_fun);
  }
}

TEST_CASE("configuration errors surface before evaluation") {
  auto c = base_config(3);
  c.initial_mean = Vector::Zero(2);
  long calls = 0;
  auto counting = [&](const Vector& x, RandomStream&) {
    ++calls;
    return x.squaredNorm();
  };
  CHECK_THROWS_AS(run(c, counting), std::invalid_argument);
  c = base_config(3);
  c.initial_sigma = -1.0;
  CHECK_THROWS_AS(run(c, counting), std::invalid_argument);
  c = base_config(3);
  c.overrides.c_alpha = 0.0;
  CHECK_THROWS_AS(run(c, counting), std::invalid_argument);
  CHECK(calls == 0);
}

TEST_CASE("evaluation budget accounting holds every generation") {
  for (auto controller : {Controller::tpa, Controller::tpa_legacy, Controller::csa}) {
    auto c = generations_only(base_config(6, controller), 150);
    auto r = run(c, ObjectiveSpec{ObjectiveKind::ellipsoid, 6});
    const long cost = resolve_params(c).lambda + (controller == Controller::csa ? 0 : 2);
    for (const auto& row : r.trace) CHECK(row.evals == row.generation * cost);
  }
}

TEST_CASE("failed evaluations") {
  auto c = generations_only(base_config(4), 30);
  const int lambda = resolve_params(c).lambda;
  const int mu = resolve_params(c).mu;

  SUBCASE("a few failures are tolerated") {
    int k = 0;
    auto flaky = [&](const Vector& x, RandomStream&) {
      return (k++ % lambda == 0) ? std::numeric_limits<double>::quiet_NaN() : x.squaredNorm();
    };
    auto r = run(c, flaky);
    CHECK(r.reason == TerminationReason::max_generations);
  }
  SUBCASE("more than lambda - mu failures abort the run") {
    int k = 0;
    auto broken = [&](const Vector& x, RandomStream&) {
      return (k++ % (lambda + 2) <= lambda - mu) ? std::numeric_limits<double>::infinity()
                                                 : x.squaredNorm();
    };
    auto r = run(c, broken);
    CHECK(r.reason == TerminationReason::failed_evaluations);
    CHECK_FALSE(r.message.empty());
  }
  SUBCASE("objective exceptions propagate") {
    auto throwing = [](const Vector&, RandomStream&) -> double { throw std::runtime_error("boom"); };
    CHECK_THROWS_AS(run(c, throwing), std::runtime_error);
  }
}

TEST_CASE("non-finite step-size aborts with a diagnostic") {
  auto c = generations_only(base_config(3), 10);
  c.overrides.alpha_change = 800.0;
  c.overrides.c_alpha = 1.0;
  auto r = run(c, [](const Vector& x, RandomStream&) { return -x.squaredNorm(); });
  CHECK(r.reason == TerminationReason::numerical_error);
  CHECK(r.message.find("step-size") != std::string::npos);
}

TEST_CASE("legacy mode moves the mean with the updated step-size") {
  auto p = salomon_legacy_params(default_params(4)).params;
  Optimizer opt(p, Controller::tpa_legacy, Vector::Constant(4, 1.0), 0.3, RandomStream(8));
  for (int g = 0; g < 20; ++g) {
    const Vector old_mean = opt.state().m;
    const double old_sigma = opt.state().sigma;
    std::vector<double> f;
    for (const auto& x : opt.ask()) f.push_back(x.squaredNorm());
    opt.tell(f);
    CHECK(opt.state().m == old_mean);  // deferred until sigma is known
    const auto tp = opt.ask();
    opt.tell(std::vector<double>{tp[0].squaredNorm(), tp[1].squaredNorm()});
    const double ratio = opt.state().sigma / old_sigma;
    // The new mean coincides with the test point that won.
    const Vector& winner = ratio > 1.0 ? tp[0] : tp[1];
    CHECK((opt.state().m - winner).norm() <= 1e-12 * (1.0 + winner.norm()));
  }
}

TEST_CASE("runs are deterministic") {
  auto c = base_config(5);
  c.termination.max_evals = 3000;
  for (auto kind : {ObjectiveKind::rosenbrock, ObjectiveKind::noisy_sphere}) {
    ObjectiveSpec spec{kind, 5, 0.3};
    auto a = run(c, spec), b = run(c, spec);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].best_f == b.trace[i].best_f);
      CHECK(a.trace[i].sigma == b.trace[i].sigma);
      CHECK(a.trace[i].trace_C == b.trace[i].trace_C);
    }
    CHECK(a.final_mean == b.final_mean);
  }
}

TEST_CASE("translation invariance while the shift is resolvable") {
  // Exact as long as |x - t| is large against the rounding error of t;
  // 100 generations keep sphere values above 1e-12.
  auto c = generations_only(base_config(5), 100);
  c.initial_sigma = 1.0;
  Vector t{{1.0, -2.0, 0.5, 4.0, -0.25}};
  auto a = run(c, sphere);
  auto shifted = c;
  shifted.initial_mean += t;
  auto b = run(shifted, [&](const Vector& x, RandomStream&) { return (x - t).squaredNorm(); });
  CHECK(same_decisions(a, b));
  CHECK((b.final_mean - t - a.final_mean).norm() < 1e-9);
}

TEST_CASE("monotone transform invariance") {
  auto c = generations_only(base_config(5), 200);
  c.initial_sigma = 1.0;
  // log(sphere) keeps full relative resolution, so exp of it stays strictly
  // increasing on every value the run produces.
  auto log_sphere = [](const Vector& x, RandomStream&) { return std::log(x.squaredNorm()); };
  auto a = run(c, log_sphere);
  auto b = run(c, [&](const Vector& x, RandomStream& r) { return std::exp(log_sphere(x, r)); });
  auto d = run(c, [&](const Vector& x, RandomStream& r) { return 5.0 * log_sphere(x, r) - 3.0; });
  CHECK(same_decisions(a, b));
  CHECK(same_decisions(a, d));
  CHECK(a.final_mean == b.final_mean);
}

TEST_CASE("restarts with increasing population size") {
  auto c = base_config(3);
  c.overrides.lambda = 10;
  c.termination.max_evals = 1000000;
  auto flat = [](const Vector&, RandomStream&) { return 1.0; };

  RestartPolicy policy;
  policy.max_restarts = 2;
  auto r = run_with_restarts(c, flat, policy);
  CHECK(r.lambdas == std::vector<int>{10, 20, 40});
  CHECK(r.reason == TerminationReason::tol_fun);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].generation == r.trace[i - 1].generation + 1);
    CHECK(r.trace[i].evals > r.trace[i - 1].evals);
  }

  SUBCASE("no restarts equals a plain run") {
    auto a = run_with_restarts(c, flat, RestartPolicy{});
    auto b = run(c, flat);
    CHECK(a.lambdas == std::vector<int>{10});
    CHECK(same_decisions(a, b));
  }
  SUBCASE("restart means drawn from the box") {
    RestartPolicy boxed = policy;
    boxed.lower = Vector::Constant(3, -1.0);
    boxed.upper = Vector::Constant(3, 1.0);
    auto rb = run_with_restarts(c, flat, boxed);
    CHECK(rb.lambdas.size() == 3);
  }
  SUBCASE("shared budget") {
    auto limited = c;
    limited.termination.max_evals = 500;
    RestartPolicy many;
    many.max_restarts = 10;
    auto rl = run_with_restarts(limited, flat, many);
    CHECK(rl.evals <= 500);
  }
}

TEST_CASE("restarts help on rastrigin") {
  const ObjectiveSpec spec{ObjectiveKind::rastrigin, 5};
  int plain = 0, restarted = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RunConfig c = base_config(5, Controller::tpa, seed);
    c.termination.max_evals = 200000;
    c.termination.target_f = 1e-8;
    RestartPolicy policy;
    policy.max_restarts = 6;
    policy.lower = Vector::Constant(5, -5.0);
    policy.upper = Vector::Constant(5, 5.0);
    plain += run(c, spec).reason == TerminationReason::target_f;
    restarted += run_with_restarts(c, make_objective(spec), policy).reason == TerminationReason::target_f;
  }
  MESSAGE("rastrigin successes: " << plain << " without, " << restarted << " with restarts");
  CHECK(restarted > plain);
}

TEST_CASE("update bias helps under moderate noise") {
  // noisy sphere, noise level 0.3: compare the noiseless value at the final mean
  std::vector<double> plain, biased;
  for (std::uint64_t seed = 1; seed <= 11; ++seed) {
    RunConfig c = base_config(10, Controller::tpa, seed);
    c.termination.max_evals = 20000;
    c.termination.tol_x = 0.0;
    c.termination.tol_fun = 0.0;
    const ObjectiveSpec spec{ObjectiveKind::noisy_sphere, 10, 0.3};
    plain.push_back(run(c, spec).final_mean.squaredNorm());
    c.overrides.beta_bias = 0.1;
    biased.push_back(run(c, spec).final_mean.squaredNorm());
  }
  std::sort(plain.begin(), plain.end());
  std::sort(biased.begin(), biased.end());
  MESSAGE("median noiseless f: beta=0 " << plain[5] << ", beta=0.1 " << biased[5]);
  CHECK(biased[5] < plain[5]);
}
