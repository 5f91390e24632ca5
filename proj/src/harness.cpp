#include "tcsde/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tcsde/errors.hpp"
#include "tcsde/rng.hpp"
#include "tcsde/solver.hpp"
#include "tcsde/time_change.hpp"
#include "tcsde/vec_util.hpp"

namespace tcsde {

void ExperimentConfig::validate() const {
  try {
    model_by_name(model);
  } catch (const std::invalid_argument& e) {
    throw usage_error(std::string("model: ") + e.what());
  }
  try {
    subordinator.validate();
  } catch (const std::invalid_argument& e) {
    throw usage_error(std::string("subordinator: ") + e.what());
  }
  if (!(epsilon > 0.0 && epsilon <= 0.25)) {
    throw usage_error("epsilon: must lie in (0, 0.25], got " +
                      std::to_string(epsilon));
  }
  if (!(pbar >= 2.0)) {
    throw usage_error("pbar: must be at least 2");
  }
  if (!(delta_fine > 0.0 && delta_fine <= 1.0)) {
    throw usage_error("delta_fine: must lie in (0, 1]");
  }
  if (delta_list.empty()) {
    throw usage_error("deltas: at least one step size is required");
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double d : delta_list) {
    if (!(d > 0.0 && d <= 1.0)) {
      throw usage_error("deltas: each step size must lie in (0, 1]");
    }
    if (!(d < prev)) {
      throw usage_error("deltas: step sizes must be strictly decreasing");
    }
    prev = d;
    const double ratio = d / delta_fine;
    const double k = std::round(ratio);
    if (k < 2.0 || std::abs(ratio - k) > 1e-9 * k) {
      throw usage_error("deltas: " + std::to_string(d) +
                        " is not an integer multiple (>= 2) of delta_fine");
    }
  }
  if (n_paths == 0) {
    throw usage_error("paths: must be positive");
  }
  if (horizon < 0.0) {
    throw usage_error("horizon: must be positive (or 0 for the model span)");
  }
}

double ExperimentConfig::resolved_horizon(const SdeModel& m) const {
  return horizon > 0.0 ? horizon : m.time_span();
}

std::vector<std::size_t> ExperimentConfig::coarsening_factors() const {
  std::vector<std::size_t> ks;
  ks.reserve(delta_list.size());
  for (double d : delta_list) {
    ks.push_back(static_cast<std::size_t>(std::llround(d / delta_fine)));
  }
  return ks;
}

std::vector<double> coupled_sup_error(const ExperimentConfig& config,
                                      const SdeModel& model,
                                      const TruncationPolicy& policy,
                                      std::uint64_t path_index) {
  const std::size_t d = static_cast<std::size_t>(model.dim_state);
  const std::size_t m = static_cast<std::size_t>(model.dim_noise);
  const double T = config.resolved_horizon(model);
  const auto factors = config.coarsening_factors();
  const std::size_t k_max =
      *std::max_element(factors.begin(), factors.end());

  SplitMix64 rng = derive_stream(config.seed, path_index);

  // Fine grid: sampled past first passage so every coarsening still covers T.
  const SubordinatorPath fine_path =
      sample_path_until(config.subordinator, config.delta_fine, T, rng, k_max);
  const TimeChangeGrid fine_grid = build_grid(fine_path, T);
  const std::size_t n_fine = fine_grid.stop_index();

  // Fine Brownian increments over operational time, node-major.
  const double sd = std::sqrt(config.delta_fine);
  std::vector<double> dw(n_fine * m);
  for (auto& v : dw) v = sd * rng.normal();

  const Trajectory fine =
      run_path(policy, model, fine_grid, dw, Scheme::truncated_em);

  std::vector<double> out(config.delta_list.size(), 0.0);
  std::vector<double> dw_coarse;
  for (std::size_t di = 0; di < config.delta_list.size(); ++di) {
    const std::size_t k = factors[di];
    const SubordinatorPath coarse_path = coarsen(fine_path, k);
    const TimeChangeGrid coarse_grid = build_grid(coarse_path, T);
    const std::size_t n_coarse = coarse_grid.stop_index();

    // Coarse increments are block sums of the fine ones (same Brownian path).
    dw_coarse.assign(n_coarse * m, 0.0);
    for (std::size_t j = 0; j < n_coarse; ++j) {
      for (std::size_t i = j * k; i < (j + 1) * k; ++i) {
        for (std::size_t c = 0; c < m; ++c) {
          dw_coarse[j * m + c] += dw[i * m + c];
        }
      }
    }
    const Trajectory coarse =
        run_path(policy, model, coarse_grid, dw_coarse, Scheme::truncated_em);

    // Both interpolants jump only at fine grid points <= T, so this sup over
    // them equals the sup over all of [0, T].
    double sup2 = 0.0;
    for (std::size_t i = 0; i <= n_fine; ++i) {
      const auto xf = fine.state(i);
      const auto xc = coarse.state(i / k);
      double dist2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double e = xf[c] - xc[c];
        dist2 += e * e;
      }
      sup2 = std::max(sup2, dist2);
    }
    out[di] = std::pow(std::sqrt(sup2), config.pbar);
  }
  return out;
}

namespace {

struct ExperimentContext {
  SdeModel model;
  TruncationPolicy policy;

  explicit ExperimentContext(const ExperimentConfig& config)
      : model(model_by_name(config.model)),
        policy(make_policy(model, config.epsilon)) {
    // Fail fast (config_error) if any step size is too coarse for the
    // policy, instead of surfacing it as per-path failures.
    radius(policy, config.delta_fine);
    for (double delta : config.delta_list) radius(policy, delta);
  }
};

// Deterministic ordered reduction of the per-path error table.
ErrorReport reduce_error_report(const ExperimentConfig& config,
                                const std::vector<double>& errors,
                                const std::vector<unsigned char>& failed,
                                const std::string& first_failure) {
  const std::size_t n_deltas = config.delta_list.size();
  const std::size_t n_paths = config.n_paths;

  std::size_t n_failed = 0;
  for (unsigned char f : failed) n_failed += f;
  if (20 * n_failed > n_paths) {
    throw std::runtime_error("run_experiment: more than 5% of trajectories "
                             "failed; first failure: " + first_failure);
  }
  const std::size_t n_ok = n_paths - n_failed;
  if (n_ok == 0) {
    throw std::runtime_error("run_experiment: all trajectories failed: " +
                             first_failure);
  }

  ErrorReport report;
  report.n_failed_paths = n_failed;
  report.rows.resize(n_deltas);
  for (std::size_t di = 0; di < n_deltas; ++di) {
    auto& row = report.rows[di];
    row.delta = config.delta_list[di];
    double sum = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      if (!failed[p]) sum += errors[p * n_deltas + di];
    }
    row.mean_sup_error = sum / static_cast<double>(n_ok);
    double ss = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      if (!failed[p]) {
        const double e = errors[p * n_deltas + di] - row.mean_sup_error;
        ss += e * e;
      }
    }
    row.std_error =
        n_ok > 1 ? std::sqrt(ss / static_cast<double>(n_ok - 1) /
                             static_cast<double>(n_ok))
                 : 0.0;
    row.rms_error = std::pow(row.mean_sup_error, 1.0 / config.pbar);
    row.n_blowups = 0;  // the truncated scheme cannot blow up
  }

  bool positive = true;
  for (const auto& row : report.rows) positive &= row.rms_error > 0.0;
  if (positive && report.rows.size() >= 2) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(n_deltas);
    for (const auto& row : report.rows) pts.emplace_back(row.delta, row.rms_error);
    report.regression = regress_loglog(pts);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.regression = {nan, nan, nan};
  }
  return report;
}

ErrorReport run_experiment_impl(const ExperimentConfig& config, bool parallel) {
  config.validate();
  const ExperimentContext ctx(config);
  const std::size_t n_deltas = config.delta_list.size();
  const auto n_paths = static_cast<std::int64_t>(config.n_paths);

  std::vector<double> errors(config.n_paths * n_deltas, 0.0);
  std::vector<unsigned char> failed(config.n_paths, 0);
  std::vector<std::string> messages(config.n_paths);

  auto worker = [&](std::int64_t p) {
    try {
      const auto errs = coupled_sup_error(config, ctx.model, ctx.policy,
                                          static_cast<std::uint64_t>(p));
      std::copy(errs.begin(), errs.end(),
                errors.begin() + static_cast<std::size_t>(p) * n_deltas);
    } catch (const std::exception& e) {
      failed[static_cast<std::size_t>(p)] = 1;
      messages[static_cast<std::size_t>(p)] = e.what();
    }
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t p = 0; p < n_paths; ++p) worker(p);
  } else {
    for (std::int64_t p = 0; p < n_paths; ++p) worker(p);
  }

  std::string first_failure;
  for (std::size_t p = 0; p < config.n_paths; ++p) {
    if (failed[p]) {
      first_failure = messages[p];
      break;
    }
  }
  return reduce_error_report(config, errors, failed, first_failure);
}

struct MomentSample {
  double truncated_sup = 0.0;
  bool plain_blew_up = false;
  double plain_sup = 0.0;
};

double sup_state_norm(const Trajectory& traj) {
  double sup = 0.0;
  for (std::size_t n = 0; n < traj.n_nodes(); ++n) {
    sup = std::max(sup, euclidean_norm(traj.state(n)));
  }
  return sup;
}

MomentSample moment_one_path(const ExperimentConfig& config,
                             const ExperimentContext& ctx, double delta,
                             std::uint64_t delta_index,
                             std::uint64_t path_index) {
  const std::size_t m = static_cast<std::size_t>(ctx.model.dim_noise);
  const double T = config.resolved_horizon(ctx.model);
  SplitMix64 rng = derive_stream(config.seed, delta_index, path_index);

  const SubordinatorPath path =
      sample_path_until(config.subordinator, delta, T, rng);
  const TimeChangeGrid grid = build_grid(path, T);
  const double sd = std::sqrt(delta);
  std::vector<double> dw(grid.stop_index() * m);
  for (auto& v : dw) v = sd * rng.normal();

  MomentSample out;
  const Trajectory truncated =
      run_path(ctx.policy, ctx.model, grid, dw, Scheme::truncated_em);
  out.truncated_sup = sup_state_norm(truncated);

  const Trajectory plain =
      run_path(ctx.policy, ctx.model, grid, dw, Scheme::plain_em);
  out.plain_blew_up = plain.blown_up();
  if (!out.plain_blew_up) out.plain_sup = sup_state_norm(plain);
  return out;
}

MomentReport moment_experiment_impl(const ExperimentConfig& config,
                                    bool parallel) {
  config.validate();
  const ExperimentContext ctx(config);
  const auto n_paths = static_cast<std::int64_t>(config.n_paths);

  MomentReport report;
  for (std::size_t di = 0; di < config.delta_list.size(); ++di) {
    const double delta = config.delta_list[di];
    std::vector<MomentSample> samples(config.n_paths);

    auto worker = [&](std::int64_t p) {
      samples[static_cast<std::size_t>(p)] =
          moment_one_path(config, ctx, delta, di, static_cast<std::uint64_t>(p));
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t p = 0; p < n_paths; ++p) worker(p);
    } else {
      for (std::int64_t p = 0; p < n_paths; ++p) worker(p);
    }

    MomentRow row;
    row.delta = delta;
    double sum = 0.0;
    double plain_max = 0.0;
    bool any_plain = false;
    for (const auto& s : samples) {
      row.truncated_max_sup_state =
          std::max(row.truncated_max_sup_state, s.truncated_sup);
      sum += s.truncated_sup;
      if (s.plain_blew_up) {
        ++row.plain_n_blowups;
      } else {
        plain_max = std::max(plain_max, s.plain_sup);
        any_plain = true;
      }
    }
    row.truncated_mean_sup_state = sum / static_cast<double>(config.n_paths);
    row.plain_max_sup_state =
        any_plain ? plain_max : std::numeric_limits<double>::quiet_NaN();
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace

ErrorReport run_experiment(const ExperimentConfig& config) {
  return run_experiment_impl(config, true);
}

ErrorReport run_experiment_serial(const ExperimentConfig& config) {
  return run_experiment_impl(config, false);
}

MomentReport moment_experiment(const ExperimentConfig& config) {
  return moment_experiment_impl(config, true);
}

MomentReport moment_experiment_serial(const ExperimentConfig& config) {
  return moment_experiment_impl(config, false);
}

Regression regress_loglog(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) {
    throw std::invalid_argument("regress_loglog: need at least 2 points");
  }
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& [d, e] : points) {
    if (!(d > 0.0) || !(e > 0.0)) {
      throw std::domain_error(
          "regress_loglog: deltas and errors must be positive");
    }
    xs.push_back(std::log2(d));
    ys.push_back(std::log2(e));
    sx += xs.back();
    sy += ys.back();
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) {
    throw std::domain_error("regress_loglog: deltas must be distinct");
  }
  Regression reg;
  reg.slope = sxy / sxx;
  reg.intercept = my - reg.slope * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = reg.intercept + reg.slope * xs[i];
    ss_res += (ys[i] - fit) * (ys[i] - fit);
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  reg.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0)
                               : 1.0;
  return reg;
}

}  // namespace tcsde
