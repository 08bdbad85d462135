#include <cmath>
#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "tpacma/params.hpp"

using namespace tpacma;

// Reference values below were computed with mpmath at 30 significant digits.

TEST_CASE("default population size") {
  CHECK(default_params(10).lambda == 10);
  CHECK(default_params(2).lambda == 6);
  CHECK(default_params(1).lambda == 4);
  CHECK(default_params(10, 40).lambda == 40);
}

TEST_CASE("single parent degenerate case") {
  auto p = default_params(1, 2);
  CHECK(p.mu_prime == 1.0);
  CHECK(p.mu == 1);
  REQUIRE(p.weights.size() == 1);
  CHECK(p.weights[0] == 1.0);
  CHECK(p.mu_w == 1.0);
}

TEST_CASE("invalid dimension and population size are rejected") {
  CHECK_THROWS_AS(default_params(0), std::invalid_argument);
  CHECK_THROWS_AS(default_params(5, 1), std::invalid_argument);
  ParamOverrides o;
  o.lambda = 2;
  o.mu_prime_rule = MuPrimeRule::half_minus;  // mu' = 0.5 -> mu = 0
  CHECK_THROWS_AS(make_params(3, o), std::invalid_argument);
}

TEST_CASE("compute_weights") {
  auto w = compute_weights(2.0, 2);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(0.804162859932729505).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(0.195837140067270495).epsilon(1e-14));

  CHECK(compute_weights(1.0, 1) == std::vector<double>{1.0});
  CHECK(compute_weights(5.0, 5)[0] == doctest::Approx(0.456272646903405874).epsilon(1e-14));

  // ln(1.5) - ln(2) < 0
  CHECK_THROWS_AS(compute_weights(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(compute_weights(1.0, 0), std::invalid_argument);
}

TEST_CASE("variance effective selection mass") {
  CHECK(variance_effective_mass({1.0}) == 1.0);
  for (int mu : {2, 3, 7, 20}) {
    std::vector<double> equal(mu, 1.0 / mu);
    CHECK(variance_effective_mass(equal) == doctest::Approx(mu).epsilon(1e-13));
  }
  auto w = compute_weights(2.0, 2);
  CHECK(variance_effective_mass(w) == doctest::Approx(1.45978988885258633).epsilon(1e-13));
  CHECK_THROWS_AS(variance_effective_mass({}), std::invalid_argument);
}

TEST_CASE("nearest-integer parent number rounds ties down") {
  CHECK(selected_parents(2.5) == 2);
  CHECK(selected_parents(2.6) == 3);
  CHECK(selected_parents(2.4) == 2);
  CHECK(selected_parents(5.0) == 5);
  CHECK(selected_parents(0.5) == 0);
}

TEST_CASE("mu' rule switch") {
  ParamOverrides o;
  o.lambda = 11;
  CHECK(make_params(5, o).mu_prime == 5.5);
  CHECK(make_params(5, o).mu == 5);
  o.mu_prime_rule = MuPrimeRule::half_minus;
  CHECK(make_params(5, o).mu_prime == 5.0);
  CHECK(make_params(5, o).mu == 5);
  CHECK(parse_mu_prime_rule("half_minus") == MuPrimeRule::half_minus);
  CHECK_THROWS(parse_mu_prime_rule("third"));
}

TEST_CASE("learning rates") {
  CHECK(rank_one_rate(10, 1.4597) == doctest::Approx(0.0154859051163107619).epsilon(1e-13));
  auto p = default_params(10);
  CHECK(p.mu_w == doctest::Approx(3.16729928141070314).epsilon(1e-13));
  CHECK(p.c_1 == doctest::Approx(0.0152838245247517159).epsilon(1e-13));
  CHECK(p.c_mu == doctest::Approx(0.0201542827612083836).epsilon(1e-13));
  CHECK(p.c_c == doctest::Approx(4.0 / 14.0));
  CHECK(p.mu_cov == p.mu_w);
  // mu_cov = 1 switches the rank-mu update off entirely.
  CHECK(rank_mu_rate(3, 1.0, rank_one_rate(3, 1.0)) == 0.0);
  // Tiny n with a large population hits the 1 - c_1 clamp.
  const double c1 = rank_one_rate(1, 200.0);
  CHECK(rank_mu_rate(1, 200.0, c1) == doctest::Approx(1.0 - c1));
}

TEST_CASE("two-point defaults") {
  auto p = default_params(7);
  CHECK(p.alpha_test == 0.5);
  CHECK(p.alpha_change == 0.5);
  CHECK(p.beta_bias == 0.0);
  CHECK(p.c_alpha == 0.3);
}

TEST_CASE("overrides are validated, not clamped") {
  ParamOverrides o;
  o.c_1 = 0.7;
  o.c_mu = 0.5;
  CHECK_THROWS_AS(make_params(4, o), std::invalid_argument);
  o = {};
  o.c_alpha = 1.5;
  CHECK_THROWS_AS(make_params(4, o), std::invalid_argument);
  o = {};
  o.beta_bias = -0.1;
  CHECK_THROWS_AS(make_params(4, o), std::invalid_argument);
  o = {};
  o.beta_bias = 0.1;
  CHECK(make_params(4, o).beta_bias == 0.1);
}

TEST_CASE("validate reports every problem at once") {
  auto p = default_params(4);
  p.c_c = 0.0;
  p.c_alpha = 2.0;
  try {
    p.validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("c_c") != std::string::npos);
    CHECK(msg.find("c_alpha") != std::string::npos);
  }
}

TEST_CASE("default parameter invariants for n = 1..100") {
  for (int n = 1; n <= 100; ++n) {
    CAPTURE(n);
    auto p = default_params(n);
    const double sum = std::accumulate(p.weights.begin(), p.weights.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (std::size_t i = 1; i < p.weights.size(); ++i) CHECK(p.weights[i] < p.weights[i - 1]);
    CHECK(p.weights.back() > 0.0);
    CHECK(p.mu_w >= 1.0);
    CHECK(p.mu_w <= p.mu);
    CHECK(p.c_1 + p.c_mu <= 1.0);
  }
}

TEST_CASE("first [0.2 mu'] weights sum to about one half") {
  for (int lambda : {10, 100}) {
    auto p = default_params(10, lambda);
    const int k = static_cast<int>(std::lround(0.2 * p.mu_prime));
    const double head = std::accumulate(p.weights.begin(), p.weights.begin() + k, 0.0);
    CAPTURE(lambda);
    CHECK(head >= 0.35);
    CHECK(head <= 0.60);
  }
}

TEST_CASE("rank-one rate is non-increasing in mu_cov") {
  for (int n : {1, 2, 5, 10, 40}) {
    double prev = rank_one_rate(n, 1.0);
    for (double mu_cov = 1.0; mu_cov <= 200.0; mu_cov += 0.25) {
      const double c1 = rank_one_rate(n, mu_cov);
      CHECK(c1 <= prev);
      prev = c1;
    }
  }
}
