// Command-line front end: converge / moments / probe / laplace / path.
// Exit codes: 0 success, 2 usage error, 3 configuration error, 4 runtime
// error. The TCSDE_THREADS environment variable overrides the OpenMP thread
// count; output files are byte-identical regardless of it.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "tcsde/cli_io.hpp"
#include "tcsde/errors.hpp"
#include "tcsde/harness.hpp"
#include "tcsde/models.hpp"
#include "tcsde/rng.hpp"
#include "tcsde/solver.hpp"
#include "tcsde/subordinator.hpp"
#include "tcsde/time_change.hpp"
#include "tcsde/truncation.hpp"
#include "tcsde/version.hpp"

namespace {

using namespace tcsde;

struct CommonOptions {
  std::string model;
  std::string subordinator;
  double beta = 0, theta = 0, epsilon = 0, pbar = 0, delta_fine = 0,
         horizon = 0;
  std::vector<double> deltas;
  std::uint64_t paths = 0, seed = 0;
  std::string config_file;
};

void register_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--model", o.model, "model name (example1, example2, "
                  "linear-test, zero)");
  cmd->add_option("--subordinator", o.subordinator,
                  "stable | drift | stable-drift");
  cmd->add_option("--beta", o.beta, "stable index in (0,1)");
  cmd->add_option("--theta", o.theta, "drift rate");
  cmd->add_option("--epsilon", o.epsilon, "truncation exponent in (0, 0.25]");
  cmd->add_option("--pbar", o.pbar, "error exponent (>= 2)");
  cmd->add_option("--delta-fine", o.delta_fine, "reference step size");
  cmd->add_option("--deltas", o.deltas, "coarse step sizes")->delimiter(',');
  cmd->add_option("--paths", o.paths, "Monte Carlo trajectories");
  cmd->add_option("--horizon", o.horizon, "real-time horizon (0 = model span)");
  cmd->add_option("--seed", o.seed, "run seed");
  cmd->add_option("--config", o.config_file, "key=value config file");
}

ExperimentConfig resolve(CLI::App* cmd, const CommonOptions& o) {
  ExperimentConfig config;
  if (cmd->count("--config") > 0) {
    for (const auto& [key, value] : read_config_file(o.config_file)) {
      apply_config_entry(config, key, value);
    }
  }
  if (cmd->count("--model") > 0) config.model = o.model;
  if (cmd->count("--subordinator") > 0)
    apply_config_entry(config, "subordinator", o.subordinator);
  if (cmd->count("--beta") > 0) config.subordinator.beta = o.beta;
  if (cmd->count("--theta") > 0) config.subordinator.theta = o.theta;
  if (cmd->count("--epsilon") > 0) config.epsilon = o.epsilon;
  if (cmd->count("--pbar") > 0) config.pbar = o.pbar;
  if (cmd->count("--delta-fine") > 0) config.delta_fine = o.delta_fine;
  if (cmd->count("--deltas") > 0) config.delta_list = o.deltas;
  if (cmd->count("--paths") > 0) config.n_paths = o.paths;
  if (cmd->count("--horizon") > 0) config.horizon = o.horizon;
  if (cmd->count("--seed") > 0) config.seed = o.seed;
  config.validate();
  return config;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write output file '" + path + "'");
  }
  return out;
}

nlohmann::json base_manifest(const ExperimentConfig& config,
                             const std::string& subcommand) {
  RunManifest manifest;
  manifest.config = config;
  manifest.subcommand = subcommand;
  manifest.version = kVersion;
  return manifest_to_json(manifest);
}

int run_converge(CLI::App* cmd, const CommonOptions& o,
                 const std::string& output) {
  const ExperimentConfig config = resolve(cmd, o);
  const auto t0 = std::chrono::steady_clock::now();
  const ErrorReport report = run_experiment(config);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - t0;

  RunManifest manifest;
  manifest.config = config;
  manifest.subcommand = "converge";
  manifest.version = kVersion;
  manifest.duration_seconds = elapsed.count();
  manifest.report = report;

  auto out = open_output(output);
  emit_csv(report, config.seed, out);
  write_manifest_sidecar(output, manifest_to_json(manifest));

  std::cout << "converge: model=" << config.model
            << " slope=" << report.regression.slope
            << " r_squared=" << report.regression.r_squared << "\n"
            << "wrote " << output << " (+ manifest)\n";
  std::cerr << "duration_seconds=" << elapsed.count() << "\n";
  return 0;
}

int run_moments(CLI::App* cmd, const CommonOptions& o,
                const std::string& output) {
  const ExperimentConfig config = resolve(cmd, o);
  const auto t0 = std::chrono::steady_clock::now();
  const MomentReport report = moment_experiment(config);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - t0;

  auto out = open_output(output);
  emit_moments_csv(report, config.seed, out);
  write_manifest_sidecar(output, base_manifest(config, "moments"));

  std::cout << "moments: model=" << config.model << "\n";
  for (const auto& row : report.rows) {
    std::cout << "  delta=" << row.delta
              << " truncated_max_sup=" << row.truncated_max_sup_state
              << " plain_blowups=" << row.plain_n_blowups << "/"
              << config.n_paths << "\n";
  }
  std::cout << "wrote " << output << " (+ manifest)\n";
  std::cerr << "duration_seconds=" << elapsed.count() << "\n";
  return 0;
}

nlohmann::json report_to_json(const AssumptionReport& r) {
  nlohmann::json w{{"t", r.witness.t}, {"s", r.witness.s}, {"x", r.witness.x}};
  if (!r.witness.y.empty()) w["y"] = r.witness.y;
  return nlohmann::json{{"assumption", r.assumption},
                        {"estimate_first", r.estimate_first},
                        {"estimate_second", r.estimate_second},
                        {"constant_estimate", r.constant_estimate},
                        {"max_violation_statistic", r.max_violation_statistic},
                        {"passed", r.passed},
                        {"witness", w}};
}

int run_probe(CLI::App* cmd, const CommonOptions& o, const std::string& output,
              std::size_t n_probes, double ball_radius, double p, double q) {
  const ExperimentConfig config = resolve(cmd, o);
  const SdeModel model = model_by_name(config.model);

  nlohmann::json j;
  j["model"] = config.model;
  j["seed"] = config.seed;
  j["n_probes"] = n_probes;
  j["ball_radius"] = ball_radius;
  j["p"] = p;
  j["q"] = q;
  j["version"] = kVersion;
  j["note"] = "probe estimates are sup-type lower bounds; 'passed' means the "
              "estimate stabilized under refinement, not a proof";
  j["assumptions"] = {
      {"local_lipschitz",
       report_to_json(probe_assumption_1(model, n_probes, ball_radius,
                                         config.seed))},
      {"monotonicity",
       report_to_json(probe_assumption_2(model, p, n_probes, ball_radius,
                                         config.seed))},
      {"khasminskii",
       report_to_json(probe_assumption_3(model, q, n_probes, ball_radius,
                                         config.seed))},
      {"temporal_hoelder",
       report_to_json(probe_assumption_4(model, n_probes, config.seed))},
  };

  bool all_passed = true;
  for (const auto& [name, rep] : j["assumptions"].items()) {
    all_passed = all_passed && rep["passed"].get<bool>();
  }
  j["all_passed"] = all_passed;

  auto out = open_output(output);
  out << j.dump(2) << '\n';
  std::cout << "probe: model=" << config.model
            << " all_passed=" << (all_passed ? "true" : "false") << "\n"
            << "wrote " << output << "\n";
  return 0;
}

int run_laplace(CLI::App* cmd, const CommonOptions& o,
                const std::string& output, std::vector<double> betas,
                std::vector<double> deltas, std::vector<double> rs,
                std::size_t n_samples) {
  const ExperimentConfig config = resolve(cmd, o);

  if (cmd->count("--beta") > 0) betas = {config.subordinator.beta};
  std::vector<LaplaceRow> rows;
  std::uint64_t cell = 0;
  for (double beta : betas) {
    SubordinatorSpec spec = config.subordinator;
    if (spec.kind != SubordinatorKind::drift_only) spec.beta = beta;
    for (double delta : deltas) {
      for (double r : rs) {
        SplitMix64 rng = derive_stream(config.seed, 0xA11CE, cell++);
        LaplaceRow row;
        row.spec = spec;
        row.delta = delta;
        row.r = r;
        row.check = validate_laplace(spec, delta, r, n_samples, rng);
        rows.push_back(row);
      }
    }
    if (spec.kind == SubordinatorKind::drift_only) break;
  }

  auto out = open_output(output);
  emit_laplace_csv(rows, config.seed, out);
  write_manifest_sidecar(output, base_manifest(config, "laplace"));

  std::size_t n_ok = 0;
  for (const auto& row : rows) {
    const double z = row.check.std_error > 0.0
                         ? (row.check.empirical - row.check.analytic) /
                               row.check.std_error
                         : 0.0;
    if (std::abs(z) <= 3.0) ++n_ok;
  }
  std::cout << "laplace: " << n_ok << "/" << rows.size()
            << " cells within 3 standard errors\n"
            << "wrote " << output << " (+ manifest)\n";
  return 0;
}

int run_dump_path(CLI::App* cmd, const CommonOptions& o,
                  const std::string& output, double delta,
                  const std::string& scheme_name) {
  const ExperimentConfig config = resolve(cmd, o);
  const SdeModel model = model_by_name(config.model);
  const TruncationPolicy policy = make_policy(model, config.epsilon);
  const double T = config.resolved_horizon(model);
  const Scheme scheme =
      scheme_name == "plain" ? Scheme::plain_em : Scheme::truncated_em;

  SplitMix64 rng = derive_stream(config.seed, 0);
  const SubordinatorPath path =
      sample_path_until(config.subordinator, delta, T, rng);
  const TimeChangeGrid grid = build_grid(path, T);
  const std::size_t m = static_cast<std::size_t>(model.dim_noise);
  std::vector<double> dw(grid.stop_index() * m);
  const double sd = std::sqrt(delta);
  for (auto& v : dw) v = sd * rng.normal();

  const Trajectory traj = run_path(policy, model, grid, dw, scheme);

  auto out = open_output(output);
  emit_path_csv(traj, model, config.seed, out);
  write_manifest_sidecar(output, base_manifest(config, "path"));

  std::cout << "path: model=" << config.model << " delta=" << delta
            << " nodes=" << traj.n_nodes()
            << (traj.blown_up() ? " (blew up)" : "") << "\n"
            << "wrote " << output << " (+ manifest)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("TCSDE_THREADS")) {
    const int n = std::atoi(env);
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
  }

  CLI::App app{"Truncated Euler-Maruyama for non-autonomous time-changed "
               "SDEs: strong-convergence and moment experiments"};
  app.set_version_flag("--version", tcsde::kVersion);
  app.require_subcommand(1);

  CommonOptions converge_opts, moments_opts, probe_opts, laplace_opts,
      path_opts;

  auto* converge = app.add_subcommand(
      "converge", "coupled strong-error estimate and log-log regression");
  register_common(converge, converge_opts);
  std::string converge_out = "converge.csv";
  converge->add_option("--output", converge_out, "output CSV");

  auto* moments = app.add_subcommand(
      "moments", "state-magnitude table and plain-EM blow-up counts");
  register_common(moments, moments_opts);
  std::string moments_out = "moments.csv";
  moments->add_option("--output", moments_out, "output CSV");

  auto* probe = app.add_subcommand(
      "probe", "numeric screening of the model regularity conditions");
  register_common(probe, probe_opts);
  std::string probe_out = "probe.json";
  std::size_t probe_n = 10000;
  double probe_radius = 3.0, probe_p = 3.0, probe_q = 3.0;
  probe->add_option("--output", probe_out, "output JSON");
  probe->add_option("--probes", probe_n, "probe count per batch");
  probe->add_option("--ball-radius", probe_radius, "probe ball radius");
  probe->add_option("--p", probe_p, "monotonicity exponent (> 2)");
  probe->add_option("--q", probe_q, "growth exponent (> 2)");

  auto* laplace = app.add_subcommand(
      "laplace", "subordinator increment validation via Laplace transform");
  register_common(laplace, laplace_opts);
  std::string laplace_out = "laplace.csv";
  std::vector<double> laplace_betas = {0.5, 0.7, 0.9};
  std::vector<double> laplace_deltas = {0.01, 1.0};
  std::vector<double> laplace_rs = {0.5, 1.0, 2.0};
  std::size_t laplace_samples = 100000;
  laplace->add_option("--output", laplace_out, "output CSV");
  laplace->add_option("--delta", laplace_deltas, "increment step sizes")
      ->delimiter(',');
  laplace->add_option("--r", laplace_rs, "Laplace arguments")->delimiter(',');
  laplace->add_option("--samples", laplace_samples, "draws per cell");

  auto* path = app.add_subcommand("path", "dump one trajectory as CSV");
  register_common(path, path_opts);
  std::string path_out = "path.csv";
  double path_delta = 1e-2;
  std::string path_scheme = "truncated";
  path->add_option("--output", path_out, "output CSV");
  path->add_option("--delta", path_delta, "step size");
  path->add_option("--scheme", path_scheme, "truncated | plain");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n"
              << "valid subcommands: converge, moments, probe, laplace, path\n";
    return 2;
  }

  try {
    if (converge->parsed()) {
      return run_converge(converge, converge_opts, converge_out);
    }
    if (moments->parsed()) {
      return run_moments(moments, moments_opts, moments_out);
    }
    if (probe->parsed()) {
      return run_probe(probe, probe_opts, probe_out, probe_n, probe_radius,
                       probe_p, probe_q);
    }
    if (laplace->parsed()) {
      return run_laplace(laplace, laplace_opts, laplace_out, laplace_betas,
                         laplace_deltas, laplace_rs, laplace_samples);
    }
    if (path->parsed()) {
      return run_dump_path(path, path_opts, path_out, path_delta, path_scheme);
    }
  } catch (const tcsde::usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const tcsde::config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
