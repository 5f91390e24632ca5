#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "tcsde/rng.hpp"
#include "tcsde/time_change.hpp"

using namespace tcsde;

namespace {

SubordinatorPath drift_path(double theta, double delta, double horizon,
                            std::size_t extra = 0) {
  SplitMix64 rng(0);
  return sample_path_until(SubordinatorSpec::drift_only(theta), delta, horizon,
                           rng, extra);
}

}  // namespace

TEST_CASE("build_grid stopping rule") {
  SUBCASE("drift-only worked example") {
    // D(t_n) = 0.1 n, T = 0.35: N = 3 and rho = [0, 0.1, 0.2, 0.3, 0.4].
    const auto grid = build_grid(drift_path(1.0, 0.1, 0.35), 0.35);
    REQUIRE(grid.rho.size() == 5);
    CHECK(grid.stop_index() == 3);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(grid.rho[i] == doctest::Approx(0.1 * static_cast<double>(i)));
    }
    CHECK(grid.rho[3] <= 0.35);
    CHECK(grid.rho[4] > 0.35);
  }
  SUBCASE("first increment past T gives N=0") {
    const auto grid = build_grid(drift_path(1.0, 0.1, 0.05), 0.05);
    REQUIRE(grid.rho.size() == 2);
    CHECK(grid.stop_index() == 0);
  }
  SUBCASE("rho is the cumulative sequence element-wise") {
    SplitMix64 rng(21);
    const auto path =
        sample_path_until(SubordinatorSpec::stable(0.8), 1e-3, 0.5, rng);
    const auto grid = build_grid(path, 0.5);
    for (std::size_t i = 0; i < grid.rho.size(); ++i) {
      CHECK(grid.rho[i] == path.cumulative[i]);
    }
  }
  SUBCASE("coverage error") {
    auto path = drift_path(1.0, 0.1, 0.35);
    CHECK_THROWS_AS(build_grid(path, 10.0), std::invalid_argument);
  }
}

TEST_CASE("evaluate_E worked examples") {
  const auto grid = build_grid(drift_path(1.0, 0.1, 0.35), 0.35);
  CHECK(evaluate_E(grid, 0.35) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(evaluate_E(grid, 0.0) == 0.0);
  // Right-continuity at a grid point: 0.1 lies in [rho_1, rho_2).
  CHECK(evaluate_E(grid, 0.1) == doctest::Approx(0.1));
  CHECK_THROWS_AS(evaluate_E(grid, -0.01), std::domain_error);
  CHECK_THROWS_AS(evaluate_E(grid, 0.36), std::domain_error);
}

TEST_CASE("E is a nondecreasing step function with jumps of delta") {
  SplitMix64 rng = derive_stream(5, 5);
  const double delta = 1e-3;
  const auto path =
      sample_path_until(SubordinatorSpec::stable(0.9), delta, 1.0, rng);
  const auto grid = build_grid(path, 1.0);
  const std::size_t n_stop = grid.stop_index();

  // Right-continuity and jump size at every interior grid point.
  bool jumps_ok = true;
  for (std::size_t i = 1; i <= n_stop; ++i) {
    const double at = evaluate_E(grid, grid.rho[i]);
    const double before = evaluate_E(grid, std::nextafter(grid.rho[i], 0.0));
    jumps_ok = jumps_ok && at == static_cast<double>(i) * delta &&
               before == static_cast<double>(i - 1) * delta;
  }
  CHECK(jumps_ok);

  // Monotone in t over random points.
  double prev_t = 0.0, prev_e = 0.0;
  bool monotone = true;
  for (int i = 0; i < 1000; ++i) {
    const double t = prev_t + rng.uniform_open01() * (1.0 - prev_t) * 0.01;
    const double e = evaluate_E(grid, t);
    monotone = monotone && e >= prev_e;
    prev_t = t;
    prev_e = e;
  }
  CHECK(monotone);
}

TEST_CASE("drift-only inverse is within delta of t/theta") {
  for (double theta : {1.0, 2.0}) {
    const double delta = 1e-3;
    const auto grid = build_grid(drift_path(theta, delta, 1.0), 1.0);
    SplitMix64 rng(17);
    bool ok = true;
    for (int i = 0; i < 1000; ++i) {
      const double t = rng.uniform_open01();
      ok = ok && std::abs(evaluate_E(grid, t) - t / theta) <= delta;
    }
    CHECK(ok);
  }
}

TEST_CASE("coarsen") {
  SUBCASE("factor 1 is the identity") {
    SplitMix64 rng(31);
    const auto fine =
        sample_path_until(SubordinatorSpec::stable(0.7), 1e-2, 1.0, rng);
    const auto same = coarsen(fine, 1);
    CHECK(same.delta == fine.delta);
    CHECK(same.cumulative == fine.cumulative);
    CHECK(same.increments == fine.increments);
  }
  SUBCASE("drift-only arithmetic") {
    const auto fine = drift_path(1.0, 0.1, 2.0, 10);
    const auto coarse = coarsen(fine, 5);
    CHECK(coarse.delta == doctest::Approx(0.5));
    for (std::size_t j = 0; j < coarse.increments.size(); ++j) {
      CHECK(coarse.increments[j] == doctest::Approx(0.5));
    }
    CHECK(coarse.cumulative[1] == doctest::Approx(0.5));
    CHECK(coarse.cumulative[2] == doctest::Approx(1.0));
  }
  SUBCASE("coarse cumulative is a bit-exact subsequence") {
    SplitMix64 rng(32);
    const auto fine =
        sample_path_until(SubordinatorSpec::stable(0.9), 1e-3, 1.0, rng, 7);
    const auto coarse = coarsen(fine, 7);
    for (std::size_t j = 0; j < coarse.cumulative.size(); ++j) {
      CHECK(coarse.cumulative[j] == fine.cumulative[j * 7]);
    }
    // Increment/cumulative consistency holds bit-exactly by construction.
    bool consistent = true;
    for (std::size_t j = 1; j < coarse.cumulative.size(); ++j) {
      consistent = consistent && (coarse.cumulative[j] -
                                      coarse.cumulative[j - 1] ==
                                  coarse.increments[j - 1]);
    }
    CHECK(consistent);
  }
  SUBCASE("parameter errors") {
    const auto fine = drift_path(1.0, 0.1, 0.5);
    CHECK_THROWS_AS(coarsen(fine, 0), std::invalid_argument);
    CHECK_THROWS_AS(coarsen(fine, 1000), std::invalid_argument);
  }
}

TEST_CASE("coarse rho grid is a subset of the fine rho grid") {
  SplitMix64 rng(33);
  const std::size_t k = 5;
  const auto fine =
      sample_path_until(SubordinatorSpec::stable(0.9), 1e-3, 1.0, rng, k);
  const auto fine_grid = build_grid(fine, 1.0);
  const auto coarse_grid = build_grid(coarsen(fine, k), 1.0);
  // Every coarse grid point is a fine path point; all but possibly the last
  // straddling one are fine grid points.
  bool subset = true;
  for (std::size_t j = 0; j < coarse_grid.rho.size(); ++j) {
    subset = subset && coarse_grid.rho[j] == fine.cumulative[j * k];
  }
  CHECK(subset);
  CHECK(coarse_grid.rho[coarse_grid.stop_index()] <=
        fine_grid.rho[fine_grid.stop_index()]);
}
