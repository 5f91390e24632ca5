#pragma once

#include <cmath>
#include <span>

namespace tcsde {

inline double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double euclidean_norm(std::span<const double> x) {
  return std::sqrt(squared_norm(x));
}

inline bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace tcsde
