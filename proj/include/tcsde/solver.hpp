#pragma once

// Discrete truncated Euler-Maruyama recursion on a time-change grid:
//   X_{rho_{n+1}} = X_{rho_n} + f_delta(t_n, X_{rho_n}) * delta
//                             + g_delta(t_n, X_{rho_n}) * dW_n
// with dW_n the Brownian increment over operational time (variance delta),
// plus an untruncated comparator that is allowed to blow up.

#include <cstddef>
#include <optional>
#include <span>

#include "tcsde/models.hpp"
#include "tcsde/time_change.hpp"
#include "tcsde/truncation.hpp"

namespace tcsde {

enum class Scheme { truncated_em, plain_em };

// States that blow past this (or go non-finite) stop a plain_em run.
inline constexpr double kBlowupThreshold = 1e15;

struct Trajectory {
  const TimeChangeGrid* grid = nullptr;
  int dim = 1;
  // Node-major flattened states; node n starts at states[n*dim].
  std::vector<double> states;
  Scheme scheme = Scheme::truncated_em;
  // True when every truncated coefficient evaluation stayed within kappa.
  bool coeff_bound_ok = true;
  // For plain_em: index of the first non-finite/oversized node; the stored
  // states are the prefix before it.
  std::optional<std::size_t> blowup_index;

  std::size_t n_nodes() const {
    return states.size() / static_cast<std::size_t>(dim);
  }
  std::span<const double> state(std::size_t n) const {
    const auto d = static_cast<std::size_t>(dim);
    return {states.data() + n * d, d};
  }
  bool blown_up() const { return blowup_index.has_value(); }
};

// One truncated EM step from x at real time t.
Vec em_step(const TruncationPolicy& policy, double delta, const SdeModel& model,
            double t, const Vec& x, const Vec& dW);

// One plain (untruncated) EM step; throws std::overflow_error with a
// (t, x) witness if the result is non-finite.
Vec em_step_plain(const SdeModel& model, double delta, double t, const Vec& x,
                  const Vec& dW);

// Runs the recursion along rho_0..rho_N. brownian_increments holds N
// m-vectors (variance delta per component), node-major. The time argument of
// step n is t_start + rho_n clipped to t_end, so coefficients are never
// evaluated outside the model's time domain.
Trajectory run_path(const TruncationPolicy& policy, const SdeModel& model,
                    const TimeChangeGrid& grid,
                    std::span<const double> brownian_increments, Scheme scheme);

// Step interpolant: states[i] for the unique i with rho_i <= t < rho_{i+1}.
Vec evaluate_step_interpolant(const Trajectory& traj, double t);

}  // namespace tcsde
