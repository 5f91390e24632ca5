#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "tcsde/rng.hpp"
#include "tcsde/subordinator.hpp"

using namespace tcsde;

TEST_CASE("spec validation rejects out-of-domain parameters") {
  CHECK_THROWS_AS(SubordinatorSpec::stable(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SubordinatorSpec::stable(1.0), std::invalid_argument);
  CHECK_THROWS_AS(SubordinatorSpec::drift_only(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SubordinatorSpec::stable_with_drift(0.5, -1.0),
                  std::invalid_argument);
  CHECK_NOTHROW(SubordinatorSpec::stable(0.9));
}

TEST_CASE("drift-only increment is exactly theta*delta") {
  SplitMix64 rng(1);
  const auto spec = SubordinatorSpec::drift_only(1.0);
  CHECK(sample_increment(spec, 0.1, rng) == 0.1);
}

TEST_CASE("stable increments match the Laplace transform (beta=0.5, delta=1)") {
  // Oracle: E exp(-r D(t)) = exp(-t r^beta); at beta=0.5, t=1, r=1 the
  // analytic value is exp(-1).
  SplitMix64 rng = derive_stream(2024, 0);
  const auto spec = SubordinatorSpec::stable(0.5);
  const std::size_t n = 1000000;
  double sum = 0, sum_sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::exp(-sample_increment(spec, 1.0, rng));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1.0));
  const double se = sd / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - std::exp(-1.0)) <= 3.0 * se);
}

TEST_CASE("increments are strictly positive across families") {
  SplitMix64 rng(7);
  for (const auto& spec :
       {SubordinatorSpec::stable(0.5), SubordinatorSpec::stable(0.9),
        SubordinatorSpec::stable_with_drift(0.7, 2.0)}) {
    bool positive = true;
    for (int i = 0; i < 100000; ++i) {
      positive = positive && (sample_increment(spec, 1e-4, rng) > 0.0);
    }
    CHECK(positive);
  }
}

TEST_CASE("path stopping rule, drift-only") {
  SplitMix64 rng(3);
  SUBCASE("theta=2, delta=0.5, T=1") {
    // Oracle: D(t_n) = n*theta*delta = n, so N = max{n : n <= 1} = 1 and the
    // path is [0, 1, 2].
    const auto path =
        sample_path_until(SubordinatorSpec::drift_only(2.0), 0.5, 1.0, rng);
    REQUIRE(path.cumulative.size() == 3);
    CHECK(path.cumulative[0] == 0.0);
    CHECK(path.cumulative[1] == 1.0);
    CHECK(path.cumulative[2] == 2.0);
  }
  SUBCASE("first increment already exceeds T") {
    const auto path =
        sample_path_until(SubordinatorSpec::drift_only(1.0), 0.1, 0.05, rng);
    REQUIRE(path.cumulative.size() == 2);
    CHECK(path.cumulative[0] == 0.0);
    CHECK(path.cumulative[1] == doctest::Approx(0.1));
  }
}

TEST_CASE("path stopping rule, stable") {
  SplitMix64 rng = derive_stream(11, 4);
  const auto path =
      sample_path_until(SubordinatorSpec::stable(0.7), 1e-3, 1.0, rng);
  const auto n = path.cumulative.size();
  REQUIRE(n >= 2);
  CHECK(path.cumulative[n - 1] > 1.0);
  CHECK(path.cumulative[n - 2] <= 1.0);
  // Path invariants: strictly increasing, increments consistent bit-exactly.
  bool increasing = true, consistent = true, positive = true;
  for (std::size_t i = 1; i < n; ++i) {
    increasing = increasing && (path.cumulative[i] > path.cumulative[i - 1]);
    consistent =
        consistent &&
        (path.cumulative[i] - path.cumulative[i - 1] == path.increments[i - 1]);
    positive = positive && path.increments[i - 1] > 0.0;
  }
  CHECK(increasing);
  CHECK(consistent);
  CHECK(positive);
  CHECK(path.cumulative[0] == 0.0);
}

TEST_CASE("extension keeps sampling past first passage") {
  SplitMix64 rng(5);
  const auto spec = SubordinatorSpec::drift_only(1.0);
  const auto base = sample_path_until(spec, 0.25, 1.0, rng);
  SplitMix64 rng2(5);
  const auto extended = sample_path_until(spec, 0.25, 1.0, rng2, 8);
  CHECK(extended.increments.size() == base.increments.size() + 8);
}

TEST_CASE("validate_laplace") {
  SUBCASE("degenerate drift-only case") {
    SplitMix64 rng(9);
    const auto check =
        validate_laplace(SubordinatorSpec::drift_only(1.0), 1.0, 1.0, 1000, rng);
    CHECK(check.analytic == std::exp(-1.0));
    CHECK(check.empirical == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    CHECK(check.std_error <= 1e-9);
  }
  SUBCASE("analytic values from the exponent") {
    SplitMix64 rng(10);
    const auto a =
        validate_laplace(SubordinatorSpec::stable(0.5), 2.0, 1.0, 1000, rng);
    CHECK(a.analytic == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    const auto b =
        validate_laplace(SubordinatorSpec::stable(0.5), 1.0, 4.0, 1000, rng);
    CHECK(b.analytic == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  }
  SUBCASE("rejects tiny sample counts") {
    SplitMix64 rng(11);
    CHECK_THROWS_AS(
        validate_laplace(SubordinatorSpec::stable(0.5), 1.0, 1.0, 10, rng),
        std::invalid_argument);
  }
}

TEST_CASE("Laplace validation over the (beta, delta, r) grid") {
  // One reseed retry per cell bounds the flake rate of this statistical test.
  for (double beta : {0.5, 0.7, 0.9}) {
    for (double delta : {0.01, 1.0}) {
      for (double r : {0.5, 1.0, 2.0}) {
        bool ok = false;
        for (std::uint64_t attempt = 0; attempt < 2 && !ok; ++attempt) {
          SplitMix64 rng = derive_stream(
              1000 + attempt, static_cast<std::uint64_t>(beta * 10),
              static_cast<std::uint64_t>(delta * 100 + r * 2));
          const auto check = validate_laplace(SubordinatorSpec::stable(beta),
                                              delta, r, 100000, rng);
          ok = std::abs(check.empirical - check.analytic) <=
               3.0 * check.std_error;
        }
        CAPTURE(beta);
        CAPTURE(delta);
        CAPTURE(r);
        CHECK(ok);
      }
    }
  }
}

TEST_CASE("refinement consistency: block sums are distributed as D(k*delta)") {
  // Summing k consecutive increments sampled at step delta gives a draw of
  // D(k*delta); check its Laplace transform.
  const auto spec = SubordinatorSpec::stable(0.8);
  const double delta = 0.25;
  const std::size_t k = 4;
  const double r = 1.0;
  bool ok = false;
  for (std::uint64_t attempt = 0; attempt < 2 && !ok; ++attempt) {
    SplitMix64 rng = derive_stream(77 + attempt, 1);
    const std::size_t n = 100000;
    double sum = 0, sum_sq = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double block = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        block += sample_increment(spec, delta, rng);
      }
      const double v = std::exp(-r * block);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1.0));
    const double se = sd / std::sqrt(static_cast<double>(n));
    const double analytic =
        std::exp(-static_cast<double>(k) * delta * spec.laplace_exponent(r));
    ok = std::abs(mean - analytic) <= 3.0 * se;
  }
  CHECK(ok);
}
