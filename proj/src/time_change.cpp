#include "tcsde/time_change.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tcsde {

TimeChangeGrid build_grid(const SubordinatorPath& path, double horizon) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("build_grid: horizon must be positive");
  }
  const auto& cum = path.cumulative;
  if (cum.empty() || cum.back() <= horizon) {
    throw std::invalid_argument(
        "build_grid: path does not cover the horizon (last cumulative value "
        "must exceed it)");
  }
  // First index with cumulative > horizon; N is the index before it.
  const auto it = std::upper_bound(cum.begin(), cum.end(), horizon);
  const std::size_t stop = static_cast<std::size_t>(it - cum.begin());

  TimeChangeGrid grid;
  grid.delta = path.delta;
  grid.horizon = horizon;
  grid.rho.assign(cum.begin(), cum.begin() + static_cast<std::ptrdiff_t>(stop + 1));
  return grid;
}

double evaluate_E(const TimeChangeGrid& grid, double t) {
  if (!(t >= 0.0) || t > grid.horizon) {
    throw std::domain_error("evaluate_E: t must lie in [0, horizon], got " +
                            std::to_string(t));
  }
  // Unique i with rho[i] <= t < rho[i+1]; at a grid point the right limit wins.
  const auto it = std::upper_bound(grid.rho.begin(), grid.rho.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - grid.rho.begin()) - 1;
  return static_cast<double>(i) * grid.delta;
}

SubordinatorPath coarsen(const SubordinatorPath& fine, std::size_t factor) {
  if (factor == 0) {
    throw std::invalid_argument("coarsen: factor must be at least 1");
  }
  const std::size_t n_coarse = fine.increments.size() / factor;
  if (n_coarse == 0) {
    throw std::invalid_argument(
        "coarsen: factor exceeds the number of fine increments");
  }
  SubordinatorPath coarse;
  coarse.delta = static_cast<double>(factor) * fine.delta;
  coarse.cumulative.reserve(n_coarse + 1);
  coarse.increments.reserve(n_coarse);
  coarse.cumulative.push_back(0.0);
  for (std::size_t j = 1; j <= n_coarse; ++j) {
    coarse.cumulative.push_back(fine.cumulative[j * factor]);
    coarse.increments.push_back(coarse.cumulative[j] - coarse.cumulative[j - 1]);
  }
  return coarse;
}

}  // namespace tcsde
