#pragma once

// SDE model interface plus the built-in example models and numeric screening
// probes for the regularity conditions the solver relies on (local Lipschitz,
// monotonicity, Khasminskii-type growth, temporal Hölder continuity).

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcsde {

using Vec = std::vector<double>;

// Coefficient growth envelope: a strictly increasing mu with its inverse,
// satisfying sup_{t} sup_{|x|<=u} (|f| v |g|) <= mu(u) for all u >= 1.
struct MuEnvelope {
  std::function<double(double)> mu;
  std::function<double(double)> mu_inv;
};

struct SdeModel {
  std::string name;
  int dim_state = 1;
  int dim_noise = 1;
  // drift(t, x[d]) -> out[d]
  std::function<void(double, std::span<const double>, std::span<double>)> drift;
  // diffusion(t, x[d]) -> out[d*m], row-major
  std::function<void(double, std::span<const double>, std::span<double>)>
      diffusion;
  double alpha = 0.0;    // state growth exponent
  double gamma_f = 1.0;  // temporal Hölder exponent of f, in (0,1]
  double gamma_g = 1.0;  // temporal Hölder exponent of g, in (0,1]
  double t_start = 0.0;
  double t_end = 1.0;
  Vec initial_state;
  std::optional<MuEnvelope> mu_envelope;

  double time_span() const { return t_end - t_start; }
};

// dY = (sqrt(t(1-t)) Y^2 - 2 Y^5) dE + (t(1-t))^{1/4} Y^2 dB(E) on [0,1],
// Y(0) = 2; alpha = 4, gamma_f = 1/2, gamma_g = 1/4, envelope mu(u) = 3 u^5.
SdeModel example1();

// Two-dimensional coupled system on [1,2] with scalar noise:
//   dx1 = (c1(t) x1^2 - 2 x2^5) dE + c2(t) x2^2 dB(E)
//   dx2 = (c1(t) x2^2 - 2 x1^5) dE + c2(t) x1^2 dB(E)
// where c1 = ((t-1)(2-t))^{1/5}, c2 = ((t-1)(2-t))^{2/5}; x(0) = (1,1).
SdeModel example2();

// f = -x, g = 0: order-1 deterministic oracle for the harness.
SdeModel linear_test();

// f = g = 0: trajectories are constant.
SdeModel zero_model();

// f = x^3, g = 0: negative control; fails the monotonicity and
// Khasminskii probes with radius-growing statistics. Not in the registry.
SdeModel cubic_drift();

// Lookup by registry name: "example1", "example2", "linear-test", "zero".
SdeModel model_by_name(const std::string& name);
const std::vector<std::string>& model_names();

struct ProbeWitness {
  double t = 0.0;
  double s = 0.0;  // second time point (Hölder probe only)
  Vec x;
  Vec y;  // empty for single-point probes
};

struct AssumptionReport {
  std::string assumption;
  // Estimate from the first batch and from the refinement batch (doubled
  // probe count, or doubled ball radius for the sup-type probes).
  double estimate_first = 0.0;
  double estimate_second = 0.0;
  double constant_estimate = 0.0;  // the refined estimate
  // estimate_second minus the allowed growth of estimate_first;
  // passed <=> max_violation_statistic <= 0.
  double max_violation_statistic = 0.0;
  bool passed = false;
  ProbeWitness witness;
};

// Local Lipschitz ratio |f(t,x)-f(t,y)| / ((1+|x|^a+|y|^a)|x-y|) (and g).
// Stability rule: the estimate from 2n fresh probes may grow at most 20%.
AssumptionReport probe_assumption_1(const SdeModel& model, std::size_t n_probes,
                                    double ball_radius, std::uint64_t seed);

// Monotonicity: [(x-y)'(f(t,x)-f(t,y)) + (5p-1)/2 |g(t,x)-g(t,y)|^2] / |x-y|^2.
// Stability rule: re-run at doubled radius; growth above 5% fails.
AssumptionReport probe_assumption_2(const SdeModel& model, double p,
                                    std::size_t n_probes, double ball_radius,
                                    std::uint64_t seed);

// Khasminskii-type growth: [x'f(t,x) + (5q-1)/2 |g(t,x)|^2] / (1+|x|^2).
AssumptionReport probe_assumption_3(const SdeModel& model, double q,
                                    std::size_t n_probes, double ball_radius,
                                    std::uint64_t seed);

// Temporal Hölder: |f(s,x)-f(t,x)| / ((1+|x|^{a+1}) |s-t|^{gamma_f}) (and g).
AssumptionReport probe_assumption_4(const SdeModel& model, std::size_t n_probes,
                                    std::uint64_t seed);

}  // namespace tcsde
