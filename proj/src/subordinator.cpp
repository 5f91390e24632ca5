#include "tcsde/subordinator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tcsde {

SubordinatorSpec SubordinatorSpec::stable(double beta) {
  SubordinatorSpec s;
  s.kind = SubordinatorKind::stable;
  s.beta = beta;
  s.validate();
  return s;
}

SubordinatorSpec SubordinatorSpec::drift_only(double theta) {
  SubordinatorSpec s;
  s.kind = SubordinatorKind::drift_only;
  s.theta = theta;
  s.validate();
  return s;
}

SubordinatorSpec SubordinatorSpec::stable_with_drift(double beta,
                                                     double theta) {
  SubordinatorSpec s;
  s.kind = SubordinatorKind::stable_with_drift;
  s.beta = beta;
  s.theta = theta;
  s.validate();
  return s;
}

void SubordinatorSpec::validate() const {
  const bool has_stable = kind != SubordinatorKind::drift_only;
  const bool has_drift = kind != SubordinatorKind::stable;
  if (has_stable && !(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("subordinator: beta must lie strictly in "
                                "(0,1), got " + std::to_string(beta));
  }
  if (has_drift && !(theta > 0.0)) {
    throw std::invalid_argument("subordinator: theta must be positive, got " +
                                std::to_string(theta));
  }
}

double SubordinatorSpec::laplace_exponent(double r) const {
  switch (kind) {
    case SubordinatorKind::stable:
      return std::pow(r, beta);
    case SubordinatorKind::drift_only:
      return theta * r;
    case SubordinatorKind::stable_with_drift:
      return std::pow(r, beta) + theta * r;
  }
  return 0.0;
}

const char* SubordinatorSpec::kind_name() const {
  switch (kind) {
    case SubordinatorKind::stable: return "stable";
    case SubordinatorKind::drift_only: return "drift_only";
    case SubordinatorKind::stable_with_drift: return "stable_with_drift";
  }
  return "?";
}

double sample_standard_stable(double beta, SplitMix64& rng) {
  // Kanter (1975): with U ~ Uniform(0,pi) and W ~ Exp(1),
  //   S = sin(beta U) / (sin U)^{1/beta} * [sin((1-beta) U) / W]^{(1-beta)/beta}
  // is the totally skewed positive stable variate with E e^{-rS} = e^{-r^beta}.
  const double u = rng.uniform_open01() * std::numbers::pi;
  const double w = rng.exponential();
  const double a = std::sin(beta * u) / std::pow(std::sin(u), 1.0 / beta);
  const double b =
      std::pow(std::sin((1.0 - beta) * u) / w, (1.0 - beta) / beta);
  return a * b;
}

double sample_increment(const SubordinatorSpec& spec, double delta,
                        SplitMix64& rng) {
  spec.validate();
  if (!(delta > 0.0)) {
    throw std::invalid_argument("sample_increment: delta must be positive");
  }
  switch (spec.kind) {
    case SubordinatorKind::stable:
      return std::pow(delta, 1.0 / spec.beta) *
             sample_standard_stable(spec.beta, rng);
    case SubordinatorKind::drift_only:
      return spec.theta * delta;
    case SubordinatorKind::stable_with_drift:
      return spec.theta * delta +
             std::pow(delta, 1.0 / spec.beta) *
                 sample_standard_stable(spec.beta, rng);
  }
  return 0.0;
}

SubordinatorPath sample_path_until(const SubordinatorSpec& spec, double delta,
                                   double horizon, SplitMix64& rng,
                                   std::size_t extra_increments) {
  spec.validate();
  if (!(delta > 0.0)) {
    throw std::invalid_argument("sample_path_until: delta must be positive");
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("sample_path_until: horizon must be positive");
  }
  constexpr std::size_t kMaxSteps = 1'000'000'000;

  SubordinatorPath path;
  path.delta = delta;
  path.cumulative.push_back(0.0);

  // Stored increments are prefix differences of the accumulated sums, so
  // cumulative[i] - cumulative[i-1] == increments[i-1] holds bit-exactly.
  double cum = 0.0;
  const auto append = [&](double h) {
    const double prev = cum;
    cum += h;
    path.increments.push_back(cum - prev);
    path.cumulative.push_back(cum);
  };
  while (cum <= horizon) {
    if (path.increments.size() >= kMaxSteps) {
      throw std::runtime_error(
          "sample_path_until: exceeded 1e9 increments before covering the "
          "horizon");
    }
    append(sample_increment(spec, delta, rng));
  }
  for (std::size_t i = 0; i < extra_increments; ++i) {
    append(sample_increment(spec, delta, rng));
  }
  return path;
}

LaplaceCheck validate_laplace(const SubordinatorSpec& spec, double delta,
                              double r, std::size_t n_samples,
                              SplitMix64& rng) {
  spec.validate();
  if (!(r > 0.0)) {
    throw std::invalid_argument("validate_laplace: r must be positive");
  }
  if (n_samples < 1000) {
    throw std::invalid_argument(
        "validate_laplace: n_samples must be at least 1e3");
  }
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double v = std::exp(-r * sample_increment(spec, delta, rng));
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(n_samples);
  LaplaceCheck out;
  out.empirical = sum / n;
  const double var =
      std::max(0.0, (sum_sq - n * out.empirical * out.empirical) / (n - 1.0));
  out.std_error = std::sqrt(var / n);
  out.analytic = std::exp(-delta * spec.laplace_exponent(r));
  return out;
}

}  // namespace tcsde
