#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "tcsde/errors.hpp"
#include "tcsde/models.hpp"
#include "tcsde/rng.hpp"
#include "tcsde/solver.hpp"
#include "tcsde/time_change.hpp"
#include "tcsde/truncation.hpp"
#include "tcsde/vec_util.hpp"

using namespace tcsde;

namespace {

TimeChangeGrid make_grid(const SubordinatorSpec& spec, double delta, double T,
                         std::uint64_t seed) {
  SplitMix64 rng = derive_stream(seed, 100);
  return build_grid(sample_path_until(spec, delta, T, rng), T);
}

std::vector<double> gaussian_increments(std::size_t n, double delta,
                                        std::uint64_t seed) {
  SplitMix64 rng = derive_stream(seed, 200);
  std::vector<double> dw(n);
  const double sd = std::sqrt(delta);
  for (auto& v : dw) v = sd * rng.normal();
  return dw;
}

}  // namespace

TEST_CASE("em_step") {
  SUBCASE("zero model leaves the state unchanged") {
    const auto model = zero_model();
    const auto policy = make_policy(model, 0.25);
    CHECK(em_step(policy, 1e-2, model, 0.3, Vec{1.7}, Vec{0.4}) == Vec{1.7});
  }
  SUBCASE("worked value for example1") {
    // kappa = 0.01^{-1/4} = sqrt(10), radius = (kappa/3)^{1/5} > 1, so x = 1
    // is not truncated: 1 - 1.5*0.01 + 0.25^{1/4}*0.1 = 1.0557106781186547.
    const auto model = example1();
    const auto policy = make_policy(model, 0.25);
    const auto out = em_step(policy, 1e-2, model, 0.5, Vec{1.0}, Vec{0.1});
    CHECK(out[0] == doctest::Approx(1.0557106781186547).epsilon(1e-14));
  }
  SUBCASE("outside the ball the increment is bounded by kappa") {
    const auto model = example1();
    const auto policy = make_policy(model, 0.25);
    const double delta = 1e-4;
    const double k = kappa(policy, delta);
    const double dw = 0.37;
    const auto out = em_step(policy, delta, model, 0.5, Vec{10.0}, Vec{dw});
    CHECK(std::abs(out[0] - 10.0) <= k * delta + k * std::abs(dw) + 1e-12);
  }
}

TEST_CASE("em_step_plain overflows with a witness") {
  const auto model = example1();
  // 1e80^5 overflows to infinity.
  CHECK_THROWS_AS(em_step_plain(model, 1e-2, 0.5, Vec{1e80}, Vec{0.0}),
                  std::overflow_error);
}

TEST_CASE("run_path on the zero model is constant") {
  const auto model = zero_model();
  const auto policy = make_policy(model, 0.25);
  const auto grid = make_grid(SubordinatorSpec::stable(0.9), 1e-2, 1.0, 1);
  const auto dw = gaussian_increments(grid.stop_index(), 1e-2, 1);
  const auto traj = run_path(policy, model, grid, dw, Scheme::truncated_em);
  REQUIRE(traj.n_nodes() == grid.stop_index() + 1);
  bool constant = true;
  for (std::size_t n = 0; n < traj.n_nodes(); ++n) {
    constant = constant && traj.state(n)[0] == 1.0;
  }
  CHECK(constant);
  CHECK(traj.coeff_bound_ok);
  CHECK_FALSE(traj.blown_up());
}

TEST_CASE("linear model matches the closed form (1-delta)^n") {
  const auto model = linear_test();
  const auto policy = make_policy(model, 0.25);
  const double delta = 1e-3;
  const auto grid = make_grid(SubordinatorSpec::drift_only(1.0), delta, 1.0, 2);
  const auto dw = gaussian_increments(grid.stop_index(), delta, 2);
  const auto traj = run_path(policy, model, grid, dw, Scheme::truncated_em);

  bool ok = true;
  double worst = 0.0;
  for (std::size_t n = 0; n < traj.n_nodes(); ++n) {
    const double closed =
        std::exp(static_cast<double>(n) * std::log1p(-delta));
    const double rel = std::abs(traj.state(n)[0] - closed) / closed;
    worst = std::max(worst, rel);
    ok = ok && rel <= 1e-12;
  }
  CAPTURE(worst);
  CHECK(ok);
}

TEST_CASE("with g = 0 the scheme is exactly explicit Euler (bit level)") {
  const auto model = linear_test();
  const auto policy = make_policy(model, 0.25);
  const double delta = 1e-2;
  const auto grid = make_grid(SubordinatorSpec::drift_only(1.0), delta, 1.0, 3);
  // Nonzero Brownian increments multiply g = 0 and must not perturb anything.
  const auto dw = gaussian_increments(grid.stop_index(), delta, 3);
  const auto traj = run_path(policy, model, grid, dw, Scheme::truncated_em);

  double x = 1.0;
  bool identical = traj.state(0)[0] == x;
  for (std::size_t n = 0; n < grid.stop_index(); ++n) {
    x = x + (-x) * delta;
    identical = identical && traj.state(n + 1)[0] == x;
  }
  CHECK(identical);
}

TEST_CASE("step interpolant") {
  const auto model = example1();
  const auto policy = make_policy(model, 0.25);
  const double delta = 1e-2;
  const auto grid = make_grid(SubordinatorSpec::stable(0.9), delta, 1.0, 4);
  const auto dw = gaussian_increments(grid.stop_index(), delta, 4);
  const auto traj = run_path(policy, model, grid, dw, Scheme::truncated_em);
  const std::size_t n_stop = grid.stop_index();

  bool at_nodes = true, before_next = true;
  for (std::size_t i = 0; i <= n_stop; ++i) {
    at_nodes = at_nodes &&
               evaluate_step_interpolant(traj, grid.rho[i])[0] ==
                   traj.state(i)[0];
    if (i + 1 <= n_stop) {
      const double just_below = std::nextafter(grid.rho[i + 1], 0.0);
      before_next = before_next &&
                    evaluate_step_interpolant(traj, just_below)[0] ==
                        traj.state(i)[0];
    }
  }
  CHECK(at_nodes);
  CHECK(before_next);
  CHECK_THROWS_AS(evaluate_step_interpolant(traj, -1e-9), std::domain_error);
  CHECK_THROWS_AS(evaluate_step_interpolant(traj, 1.0 + 1e-9),
                  std::domain_error);
}

TEST_CASE("one-step mean-square increment bound") {
  // |f_delta| v |g_delta| <= kappa implies
  // E|X_{n+1} - X_n|^2 <= 2 (delta^2 kappa^2 + delta kappa^2).
  const auto model = example1();
  const auto policy = make_policy(model, 0.25);
  const double delta = 1e-3;
  const double k = kappa(policy, delta);
  const double bound = 2.0 * (delta * delta * k * k + delta * k * k);

  double sum = 0.0;
  std::size_t count = 0;
  for (std::uint64_t p = 0; p < 10; ++p) {
    const auto grid = make_grid(SubordinatorSpec::stable(0.9), delta, 1.0, 50 + p);
    const auto dw = gaussian_increments(grid.stop_index(), delta, 50 + p);
    const auto traj = run_path(policy, model, grid, dw, Scheme::truncated_em);
    for (std::size_t n = 0; n + 1 < traj.n_nodes(); ++n) {
      const double step = traj.state(n + 1)[0] - traj.state(n)[0];
      sum += step * step;
      ++count;
    }
  }
  CHECK(sum / static_cast<double>(count) <= bound);
}

TEST_CASE("truncated trajectories stay bounded across step sizes") {
  const auto model = example1();
  const auto policy = make_policy(model, 0.25);
  for (double delta : {1e-2, 1e-3}) {
    double sup = 0.0;
    for (std::uint64_t p = 0; p < 20; ++p) {
      const auto grid =
          make_grid(SubordinatorSpec::stable(0.9), delta, 1.0, 900 + p);
      const auto dw = gaussian_increments(grid.stop_index(), delta, 900 + p);
      const auto traj = run_path(policy, model, grid, dw, Scheme::truncated_em);
      CHECK(traj.coeff_bound_ok);
      CHECK_FALSE(traj.blown_up());
      for (std::size_t n = 0; n < traj.n_nodes(); ++n) {
        sup = std::max(sup, std::abs(traj.state(n)[0]));
      }
    }
    CHECK(sup < 5.0);  // starts at 2 and contracts; noise stays small
  }
}

TEST_CASE("plain EM blows up at coarse steps where truncation is the fix") {
  // At delta = 0.07 the first drift step overshoots the EM stability radius
  // delta^{-1/4} and the plain scheme diverges on almost every path.
  const auto model = example1();
  const auto policy = make_policy(model, 0.25);
  const double delta = 0.07;
  std::size_t blowups = 0;
  for (std::uint64_t p = 0; p < 20; ++p) {
    const auto grid =
        make_grid(SubordinatorSpec::stable(0.9), delta, 1.0, 7000 + p);
    const auto dw = gaussian_increments(grid.stop_index(), delta, 7000 + p);
    const auto traj = run_path(policy, model, grid, dw, Scheme::plain_em);
    if (traj.blown_up()) {
      ++blowups;
      CHECK(traj.n_nodes() == *traj.blowup_index);
      CHECK(traj.n_nodes() >= 1);
    }
  }
  CHECK(blowups >= 1);

  // The truncated scheme at its admissible steps never blows up (checked in
  // the bounded-trajectory case above); at this coarse delta the policy
  // itself rejects the configuration rather than running unprotected.
  CHECK_THROWS_AS(radius(policy, delta), config_error);
}

TEST_CASE("run_path rejects short increment arrays") {
  const auto model = zero_model();
  const auto policy = make_policy(model, 0.25);
  const auto grid = make_grid(SubordinatorSpec::drift_only(1.0), 0.1, 1.0, 6);
  std::vector<double> dw(grid.stop_index() - 1, 0.0);
  CHECK_THROWS_AS(run_path(policy, model, grid, dw, Scheme::truncated_em),
                  std::invalid_argument);
}
