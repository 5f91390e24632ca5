#include "tcsde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tcsde/vec_util.hpp"

namespace tcsde {

namespace {

double clip_time(const SdeModel& model, double rho) {
  return std::min(model.t_start + rho, model.t_end);
}

std::string witness_string(double t, std::span<const double> x) {
  std::ostringstream os;
  os << "t=" << t << ", x=(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ",";
    os << x[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

Vec em_step(const TruncationPolicy& policy, double delta, const SdeModel& model,
            double t, const Vec& x, const Vec& dW) {
  const std::size_t d = static_cast<std::size_t>(model.dim_state);
  const std::size_t m = static_cast<std::size_t>(model.dim_noise);
  TruncatedCoefficients coeffs(policy, delta, model);
  Vec f(d), g(d * m), out(d);
  coeffs.eval(t, x, f, g);
  const double bound = coeffs.kappa_bound() * (1.0 + 1e-12);
  if (!(euclidean_norm(f) <= bound && euclidean_norm(g) <= bound)) {
    // Impossible when the envelope holds; a failure here is a bug.
    throw std::logic_error("em_step: truncated coefficients exceeded kappa at " +
                           witness_string(t, x));
  }
  for (std::size_t i = 0; i < d; ++i) {
    double acc = x[i] + f[i] * delta;
    for (std::size_t j = 0; j < m; ++j) acc += g[i * m + j] * dW[j];
    out[i] = acc;
  }
  return out;
}

Vec em_step_plain(const SdeModel& model, double delta, double t, const Vec& x,
                  const Vec& dW) {
  const std::size_t d = static_cast<std::size_t>(model.dim_state);
  const std::size_t m = static_cast<std::size_t>(model.dim_noise);
  Vec f(d), g(d * m), out(d);
  model.drift(t, x, f);
  model.diffusion(t, x, g);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = x[i] + f[i] * delta;
    for (std::size_t j = 0; j < m; ++j) acc += g[i * m + j] * dW[j];
    out[i] = acc;
  }
  if (!all_finite(out)) {
    throw std::overflow_error("em_step_plain: non-finite state after step at " +
                              witness_string(t, x));
  }
  return out;
}

Trajectory run_path(const TruncationPolicy& policy, const SdeModel& model,
                    const TimeChangeGrid& grid,
                    std::span<const double> brownian_increments,
                    Scheme scheme) {
  const std::size_t d = static_cast<std::size_t>(model.dim_state);
  const std::size_t m = static_cast<std::size_t>(model.dim_noise);
  const std::size_t n_steps = grid.stop_index();
  const double delta = grid.delta;
  if (brownian_increments.size() < n_steps * m) {
    throw std::invalid_argument(
        "run_path: need one m-vector Brownian increment per step");
  }
  if (model.initial_state.size() != d) {
    throw std::invalid_argument("run_path: initial state has wrong dimension");
  }

  Trajectory traj;
  traj.grid = &grid;
  traj.dim = model.dim_state;
  traj.scheme = scheme;
  traj.states.reserve((n_steps + 1) * d);
  traj.states.insert(traj.states.end(), model.initial_state.begin(),
                     model.initial_state.end());

  Vec x = model.initial_state;
  Vec f(d), g(d * m), next(d);

  if (scheme == Scheme::truncated_em) {
    TruncatedCoefficients coeffs(policy, delta, model);
    const double bound = coeffs.kappa_bound() * (1.0 + 1e-12);
    for (std::size_t n = 0; n < n_steps; ++n) {
      const double t = clip_time(model, grid.rho[n]);
      coeffs.eval(t, x, f, g);
      if (!(euclidean_norm(f) <= bound && euclidean_norm(g) <= bound)) {
        traj.coeff_bound_ok = false;
      }
      const double* dw = brownian_increments.data() + n * m;
      for (std::size_t i = 0; i < d; ++i) {
        double acc = x[i] + f[i] * delta;
        for (std::size_t j = 0; j < m; ++j) acc += g[i * m + j] * dw[j];
        next[i] = acc;
      }
      if (!all_finite(next)) {
        // Bounded coefficients cannot overflow a finite state in one step.
        throw std::logic_error(
            "run_path: truncated_em produced a non-finite state at step " +
            std::to_string(n));
      }
      x = next;
      traj.states.insert(traj.states.end(), x.begin(), x.end());
    }
    return traj;
  }

  // plain_em: raw coefficients; stop and flag when the state leaves the
  // representable regime.
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = clip_time(model, grid.rho[n]);
    model.drift(t, x, f);
    model.diffusion(t, x, g);
    const double* dw = brownian_increments.data() + n * m;
    for (std::size_t i = 0; i < d; ++i) {
      double acc = x[i] + f[i] * delta;
      for (std::size_t j = 0; j < m; ++j) acc += g[i * m + j] * dw[j];
      next[i] = acc;
    }
    if (!all_finite(next) || euclidean_norm(next) > kBlowupThreshold) {
      traj.blowup_index = n + 1;
      return traj;
    }
    x = next;
    traj.states.insert(traj.states.end(), x.begin(), x.end());
  }
  return traj;
}

Vec evaluate_step_interpolant(const Trajectory& traj, double t) {
  const TimeChangeGrid& grid = *traj.grid;
  if (!(t >= 0.0) || t > grid.horizon) {
    throw std::domain_error(
        "evaluate_step_interpolant: t must lie in [0, horizon]");
  }
  const auto it = std::upper_bound(grid.rho.begin(), grid.rho.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - grid.rho.begin()) - 1;
  if (i >= traj.n_nodes()) {
    throw std::logic_error(
        "evaluate_step_interpolant: trajectory is truncated before t");
  }
  const auto s = traj.state(i);
  return Vec(s.begin(), s.end());
}

}  // namespace tcsde
