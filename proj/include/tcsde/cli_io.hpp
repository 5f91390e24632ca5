#pragma once

// Configuration parsing (flags over file over defaults) and result emission.
// CSV files carry 17-significant-digit decimals so parsing them back
// recovers every double bit-exactly; each emitted file gets a JSON manifest
// sidecar with everything needed to reproduce the run.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcsde/harness.hpp"
#include "tcsde/solver.hpp"
#include "tcsde/subordinator.hpp"

namespace tcsde {

// Parses a flat key=value config file ('#' starts a comment). Unknown keys
// raise usage_error naming the key.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path);

// Applies config-file values onto `config`. Keys: model, subordinator, beta,
// theta, epsilon, pbar, delta_fine, deltas, paths, horizon, seed.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

// Resolves an ExperimentConfig from a CLI token list (e.g. {"--model",
// "example2", "--paths", "50"}). Flags override config-file values override
// defaults; the result is validated. Throws usage_error on any problem.
ExperimentConfig parse_config(const std::vector<std::string>& args);

// 17-significant-digit decimal rendering (round-trips doubles).
std::string format_g17(double v);

struct RunManifest {
  ExperimentConfig config;
  std::string subcommand;
  std::string version;
  double duration_seconds = 0.0;  // in-memory only; see manifest_to_json
  ErrorReport report;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Timing is excluded by default so identical runs serialize byte-identically.
nlohmann::json manifest_to_json(const RunManifest& manifest,
                                bool include_timing = false);

// CSV emitters. emit_csv writes the header, one row per delta, then exactly
// three comment lines: # slope=, # r_squared=, # seed=.
void emit_csv(const ErrorReport& report, std::uint64_t seed, std::ostream& os);
void emit_moments_csv(const MomentReport& report, std::uint64_t seed,
                      std::ostream& os);

struct LaplaceRow {
  SubordinatorSpec spec;
  double delta = 0.0;
  double r = 0.0;
  LaplaceCheck check;
};
void emit_laplace_csv(const std::vector<LaplaceRow>& rows, std::uint64_t seed,
                      std::ostream& os);

// One trajectory: rho, clipped model time, E_delta(rho) and the state.
void emit_path_csv(const Trajectory& traj, const SdeModel& model,
                   std::uint64_t seed, std::ostream& os);

// Writes `manifest` next to `data_path` as "<data_path>.manifest.json".
void write_manifest_sidecar(const std::string& data_path,
                            const nlohmann::json& manifest);

}  // namespace tcsde
