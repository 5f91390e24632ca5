#pragma once

// Truncation machinery: kappa(delta) = delta^(-eps) caps the truncated
// coefficient magnitude, mu envelopes the coefficient growth, and pi_delta
// projects states onto the ball of radius mu^{-1}(kappa(delta)) before
// coefficients are evaluated.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>

#include "tcsde/models.hpp"

namespace tcsde {

struct TruncationPolicy {
  double mu_coeff = 0.0;  // M in the default envelope mu(u) = 2M u^(alpha+2);
                          // 0 when the model supplied its own envelope
  double alpha = 0.0;
  double epsilon = 0.25;    // in (0, 1/4]
  double kappa_hat = 1.0;   // admissibility bound for delta^{1/4} kappa(delta)
  std::function<double(double)> mu;
  std::function<double(double)> mu_inv;
};

// Builds the policy for a model. Uses the model's envelope when present;
// otherwise fits the default mu(u) = 2M u^(alpha+2) with M estimated over a
// probe grid (times a safety factor of 2). Either way the envelope property
// sup_{|x|<=u} (|f| v |g|) <= mu(u), u >= 1, is verified numerically and a
// violation throws config_error with the witness point.
TruncationPolicy make_policy(const SdeModel& model, double epsilon);

// kappa(delta) = delta^(-eps) for delta in (0,1]; throws std::domain_error
// outside that interval.
double kappa(const TruncationPolicy& policy, double delta);

// Truncation ball radius mu^{-1}(kappa(delta)). Throws config_error when
// kappa(delta) < mu(1), i.e. the step size is too coarse for the policy.
double radius(const TruncationPolicy& policy, double delta);

// pi_delta: radial projection onto the truncation ball (identity inside,
// zero at the origin).
void truncate_state(const TruncationPolicy& policy, double delta,
                    std::span<const double> x, std::span<double> out);
Vec truncate_state(const TruncationPolicy& policy, double delta, const Vec& x);

// Evaluates f_delta(t,x) = f(t, pi_delta(x)) and g likewise, sharing one
// projection. Reusable buffers keep the per-step cost allocation-free.
class TruncatedCoefficients {
 public:
  TruncatedCoefficients(const TruncationPolicy& policy, double delta,
                        const SdeModel& model);

  void eval(double t, std::span<const double> x, std::span<double> f_out,
            std::span<double> g_out);

  double truncation_radius() const { return radius_; }
  double kappa_bound() const { return kappa_; }

 private:
  const SdeModel* model_;
  double radius_;
  double kappa_;
  Vec projected_;
};

// Functional form of the pair (f_delta, g_delta).
using CoefficientFn =
    std::function<void(double, std::span<const double>, std::span<double>)>;
std::pair<CoefficientFn, CoefficientFn> truncated_coefficients(
    const TruncationPolicy& policy, double delta, const SdeModel& model);

}  // namespace tcsde
