#include "tcsde/truncation.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "tcsde/errors.hpp"
#include "tcsde/rng.hpp"
#include "tcsde/vec_util.hpp"

namespace tcsde {

namespace {

// Probe grid for envelope estimation/verification. Fixed seed: the policy
// must not vary between runs.
constexpr std::uint64_t kEnvelopeSeed = 0x7C5DE5EEDULL;
constexpr std::size_t kEnvelopeProbes = 10000;
constexpr double kEnvelopeMaxNorm = 10.0;

void draw_ball(SplitMix64& rng, double radius, std::span<double> out) {
  for (;;) {
    double s = 0.0;
    for (auto& v : out) {
      v = 2.0 * rng.uniform_open01() - 1.0;
      s += v * v;
    }
    if (s <= 1.0) break;
  }
  for (auto& v : out) v *= radius;
}

// Max of (|f| v |g|) / (1 + |x|^(alpha+1)) over the probe grid.
double estimate_envelope_coeff(const SdeModel& model) {
  SplitMix64 rng = derive_stream(kEnvelopeSeed, 1);
  const std::size_t d = static_cast<std::size_t>(model.dim_state);
  const std::size_t dm = d * static_cast<std::size_t>(model.dim_noise);
  Vec x(d), f(d), g(dm);
  double est = 0.0;
  for (std::size_t i = 0; i < kEnvelopeProbes; ++i) {
    const double t = model.t_start + rng.uniform_open01() * model.time_span();
    draw_ball(rng, kEnvelopeMaxNorm, x);
    model.drift(t, x, f);
    model.diffusion(t, x, g);
    const double mag = std::max(euclidean_norm(f), euclidean_norm(g));
    const double denom =
        1.0 + std::pow(euclidean_norm(x), model.alpha + 1.0);
    est = std::max(est, mag / denom);
  }
  return est;
}

void verify_envelope(const SdeModel& model, const TruncationPolicy& policy) {
  SplitMix64 rng = derive_stream(kEnvelopeSeed, 2);
  const std::size_t d = static_cast<std::size_t>(model.dim_state);
  const std::size_t dm = d * static_cast<std::size_t>(model.dim_noise);
  Vec x(d), f(d), g(dm);
  for (std::size_t i = 0; i < kEnvelopeProbes; ++i) {
    const double t = model.t_start + rng.uniform_open01() * model.time_span();
    draw_ball(rng, kEnvelopeMaxNorm, x);
    model.drift(t, x, f);
    model.diffusion(t, x, g);
    const double mag = std::max(euclidean_norm(f), euclidean_norm(g));
    const double u = std::max(1.0, euclidean_norm(x));
    const double bound = policy.mu(u);
    if (!(mag <= bound * (1.0 + 1e-9))) {
      std::ostringstream os;
      os << "model '" << model.name << "': coefficient magnitude " << mag
         << " exceeds envelope mu(" << u << ") = " << bound << " at t=" << t;
      throw config_error(os.str());
    }
  }
}

}  // namespace

TruncationPolicy make_policy(const SdeModel& model, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.25)) {
    throw std::invalid_argument(
        "truncation: epsilon must lie in (0, 0.25], got " +
        std::to_string(epsilon));
  }
  TruncationPolicy policy;
  policy.alpha = model.alpha;
  policy.epsilon = epsilon;
  policy.kappa_hat = 1.0;  // delta^{1/4} kappa(delta) = delta^{1/4-eps} <= 1
  if (model.mu_envelope) {
    policy.mu_coeff = 0.0;
    policy.mu = model.mu_envelope->mu;
    policy.mu_inv = model.mu_envelope->mu_inv;
  } else {
    const double m_hat = estimate_envelope_coeff(model);
    policy.mu_coeff = 2.0 * m_hat;  // safety factor 2 on the probe estimate
    const double two_m = 2.0 * policy.mu_coeff;
    const double expo = model.alpha + 2.0;
    policy.mu = [two_m, expo](double u) { return two_m * std::pow(u, expo); };
    policy.mu_inv = [two_m, expo](double u) {
      return std::pow(u / two_m, 1.0 / expo);
    };
  }
  verify_envelope(model, policy);
  return policy;
}

double kappa(const TruncationPolicy& policy, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::domain_error("kappa: delta must lie in (0, 1], got " +
                            std::to_string(delta));
  }
  return std::pow(delta, -policy.epsilon);
}

double radius(const TruncationPolicy& policy, double delta) {
  const double k = kappa(policy, delta);
  const double floor = policy.mu(1.0);
  if (k < floor) {
    std::ostringstream os;
    os << "truncation: kappa(" << delta << ") = " << k
       << " is below mu(1) = " << floor
       << "; decrease delta or increase epsilon";
    throw config_error(os.str());
  }
  return policy.mu_inv(k);
}

void truncate_state(const TruncationPolicy& policy, double delta,
                    std::span<const double> x, std::span<double> out) {
  const double r = radius(policy, delta);
  const double norm = euclidean_norm(x);
  if (norm == 0.0) {
    for (auto& v : out) v = 0.0;  // x/|x| := 0 at the origin
    return;
  }
  if (norm <= r) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i];
    return;
  }
  const double scale = r / norm;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * scale;
}

Vec truncate_state(const TruncationPolicy& policy, double delta, const Vec& x) {
  Vec out(x.size());
  truncate_state(policy, delta, x, out);
  return out;
}

TruncatedCoefficients::TruncatedCoefficients(const TruncationPolicy& policy,
                                             double delta,
                                             const SdeModel& model)
    : model_(&model),
      radius_(radius(policy, delta)),
      kappa_(kappa(policy, delta)),
      projected_(static_cast<std::size_t>(model.dim_state)) {}

void TruncatedCoefficients::eval(double t, std::span<const double> x,
                                 std::span<double> f_out,
                                 std::span<double> g_out) {
  const double norm = euclidean_norm(x);
  if (norm <= radius_) {
    for (std::size_t i = 0; i < x.size(); ++i) projected_[i] = x[i];
  } else {
    const double scale = radius_ / norm;
    for (std::size_t i = 0; i < x.size(); ++i) projected_[i] = x[i] * scale;
  }
  model_->drift(t, projected_, f_out);
  model_->diffusion(t, projected_, g_out);
}

std::pair<CoefficientFn, CoefficientFn> truncated_coefficients(
    const TruncationPolicy& policy, double delta, const SdeModel& model) {
  auto eval_f = std::make_shared<TruncatedCoefficients>(policy, delta, model);
  auto eval_g = std::make_shared<TruncatedCoefficients>(policy, delta, model);
  const std::size_t dm = static_cast<std::size_t>(model.dim_state) *
                         static_cast<std::size_t>(model.dim_noise);
  const std::size_t d = static_cast<std::size_t>(model.dim_state);
  CoefficientFn f = [eval_f, dm](double t, std::span<const double> x,
                                 std::span<double> out) {
    Vec g(dm);
    eval_f->eval(t, x, out, g);
  };
  CoefficientFn g = [eval_g, d](double t, std::span<const double> x,
                                std::span<double> out) {
    Vec f(d);
    eval_g->eval(t, x, f, out);
  };
  return {std::move(f), std::move(g)};
}

}  // namespace tcsde
