#pragma once

// Discretized inverse subordinator: the random real-time grid rho_n = D(t_n)
// and the step function E_delta(t) = i*delta on [rho_i, rho_{i+1}).

#include <cstddef>
#include <vector>

#include "tcsde/subordinator.hpp"

namespace tcsde {

struct TimeChangeGrid {
  double delta = 0.0;
  std::vector<double> rho;  // rho[0] = 0, strictly increasing, N + 2 entries
  double horizon = 0.0;     // rho[N] <= horizon < rho[N+1]

  // N, the number of scheme steps (and last state index).
  std::size_t stop_index() const { return rho.size() - 2; }
};

// Truncates the path at the stopping index for `horizon`. Throws
// std::invalid_argument if the path does not cover the horizon.
TimeChangeGrid build_grid(const SubordinatorPath& path, double horizon);

// E_delta(t) for t in [0, horizon]; right-continuous, nondecreasing.
double evaluate_E(const TimeChangeGrid& grid, double t);

// Aggregates `factor` consecutive increments. Coarse cumulative values are
// copied from the fine ones (not re-summed) so coarse and fine grids share
// bit-identical rho values; increments come from prefix differencing.
SubordinatorPath coarsen(const SubordinatorPath& fine, std::size_t factor);

}  // namespace tcsde
