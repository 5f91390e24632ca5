#pragma once

// Coupled Monte Carlo strong-error estimation: every path samples one fine
// subordinator path and one fine Brownian increment sequence, runs the
// truncated scheme at the fine step, and re-runs it at each coarse step on
// the coarsened grid with block-summed increments. Because the coarse rho
// grid is a bit-exact subsequence of the fine one, the sup-norm difference
// of the two step interpolants is evaluated exactly on the fine grid.
//
// The path loop is OpenMP-parallel; a plain serial driver with the identical
// per-path kernel and reduction is kept as the reference implementation.
// Reports are bit-identical between the two for any thread count.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tcsde/models.hpp"
#include "tcsde/subordinator.hpp"
#include "tcsde/truncation.hpp"

namespace tcsde {

struct ExperimentConfig {
  std::string model = "example1";
  SubordinatorSpec subordinator = SubordinatorSpec::stable(0.9);
  double epsilon = 0.25;
  double pbar = 2.0;  // error exponent in E sup|.|^pbar
  double delta_fine = 1e-5;
  std::vector<double> delta_list = {1e-2, 1e-3, 1e-4};
  std::size_t n_paths = 100;
  double horizon = 0.0;  // 0 means the model's time span
  std::uint64_t seed = 42;

  // Throws usage_error on invalid combinations (unknown model, epsilon
  // outside (0, 1/4], deltas that are not >=2x integer multiples of
  // delta_fine or not strictly decreasing, ...).
  void validate() const;

  double resolved_horizon(const SdeModel& model) const;
  std::vector<std::size_t> coarsening_factors() const;
};

struct DeltaErrorRow {
  double delta = 0.0;
  double mean_sup_error = 0.0;  // Monte Carlo mean of sup|.|^pbar
  double rms_error = 0.0;       // mean_sup_error^(1/pbar)
  double std_error = 0.0;       // sd of the powered sups / sqrt(n)
  std::size_t n_blowups = 0;
};

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct ErrorReport {
  std::vector<DeltaErrorRow> rows;
  Regression regression;  // log2(rms_error) against log2(delta)
  std::size_t n_failed_paths = 0;
};

// Per-delta sup errors, powered by pbar, for one coupled trajectory. Does
// not validate the config (tests drive it with k = 1 for the coupling
// identity); run_experiment validates.
std::vector<double> coupled_sup_error(const ExperimentConfig& config,
                                      const SdeModel& model,
                                      const TruncationPolicy& policy,
                                      std::uint64_t path_index);

// Monte Carlo average of coupled_sup_error over n_paths independently
// seeded trajectories, plus the log-log regression.
ErrorReport run_experiment(const ExperimentConfig& config);
ErrorReport run_experiment_serial(const ExperimentConfig& config);

struct MomentRow {
  double delta = 0.0;
  double truncated_max_sup_state = 0.0;   // max over paths of sup_n |X|
  double truncated_mean_sup_state = 0.0;  // mean over paths of sup_n |X|
  std::size_t plain_n_blowups = 0;
  double plain_max_sup_state = 0.0;  // over plain paths that completed
};

struct MomentReport {
  std::vector<MomentRow> rows;
};

// State-magnitude table across step sizes for the truncated scheme, with the
// untruncated comparator's blow-up counts alongside.
MomentReport moment_experiment(const ExperimentConfig& config);
MomentReport moment_experiment_serial(const ExperimentConfig& config);

// Ordinary least squares on (log2 delta, log2 error). Requires >= 2 points
// and positive errors (std::domain_error otherwise).
Regression regress_loglog(const std::vector<std::pair<double, double>>& points);

}  // namespace tcsde
