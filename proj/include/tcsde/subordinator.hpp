#pragma once

// Lévy subordinator increment sampling. The stable family is sampled with
// Kanter's exact method, so the increments match the target law exactly and
// can be validated against the Laplace transform E exp(-r D(t)) = exp(-t phi(r)).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tcsde/rng.hpp"

namespace tcsde {

enum class SubordinatorKind { stable, drift_only, stable_with_drift };

struct SubordinatorSpec {
  SubordinatorKind kind = SubordinatorKind::stable;
  double beta = 0.0;   // stable index, in (0,1)
  double theta = 0.0;  // drift rate, > 0 where present

  static SubordinatorSpec stable(double beta);
  static SubordinatorSpec drift_only(double theta);
  static SubordinatorSpec stable_with_drift(double beta, double theta);

  // Throws std::invalid_argument on out-of-domain parameters.
  void validate() const;

  // Laplace exponent phi(r): r^beta, theta*r, or their sum.
  double laplace_exponent(double r) const;

  const char* kind_name() const;
};

// One sampled path of D on the uniform operational-time grid t_i = i*delta.
// cumulative[0] = 0 and cumulative[i] - cumulative[i-1] == increments[i-1]
// holds bit-exactly; every increment is strictly positive.
struct SubordinatorPath {
  double delta = 0.0;
  std::vector<double> increments;
  std::vector<double> cumulative;  // increments.size() + 1 entries
};

// One draw distributed as the standard positive beta-stable law S with
// E exp(-r S) = exp(-r^beta) (Kanter's method).
double sample_standard_stable(double beta, SplitMix64& rng);

// One draw distributed as D(delta).
double sample_increment(const SubordinatorSpec& spec, double delta,
                        SplitMix64& rng);

// Samples increments until the cumulative sum strictly exceeds `horizon`,
// then `extra_increments` more (the harness extends paths so every coarsened
// version still covers the horizon). The returned path has N + 2 cumulative
// entries where N = max{ n : cumulative[n] <= horizon }, plus the extension.
SubordinatorPath sample_path_until(const SubordinatorSpec& spec, double delta,
                                   double horizon, SplitMix64& rng,
                                   std::size_t extra_increments = 0);

struct LaplaceCheck {
  double empirical = 0.0;
  double analytic = 0.0;
  double std_error = 0.0;
};

// Monte Carlo check of E exp(-r D(delta)) against exp(-delta phi(r)).
LaplaceCheck validate_laplace(const SubordinatorSpec& spec, double delta,
                              double r, std::size_t n_samples,
                              SplitMix64& rng);

}  // namespace tcsde
