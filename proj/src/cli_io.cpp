#include "tcsde/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "tcsde/errors.hpp"
#include "tcsde/time_change.hpp"
#include "tcsde/version.hpp"

namespace tcsde {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw usage_error(key + ": cannot parse '" + value + "' as a number");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw usage_error(key + ": cannot parse '" + value +
                      "' as a nonnegative integer");
  }
}

std::vector<double> parse_delta_list(const std::string& key,
                                     const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw usage_error(key + ": empty step-size list");
  return out;
}

SubordinatorKind kind_from_string(const std::string& value) {
  if (value == "stable") return SubordinatorKind::stable;
  if (value == "drift" || value == "drift_only")
    return SubordinatorKind::drift_only;
  if (value == "stable-drift" || value == "stable_with_drift")
    return SubordinatorKind::stable_with_drift;
  throw usage_error("subordinator: unknown kind '" + value +
                    "' (valid: stable, drift, stable-drift)");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw usage_error("config: cannot open file '" + path + "'");
  }
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw usage_error("config: expected key=value, got '" + line + "'");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "model") {
    config.model = value;
  } else if (key == "subordinator") {
    config.subordinator.kind = kind_from_string(value);
  } else if (key == "beta") {
    config.subordinator.beta = parse_double(key, value);
  } else if (key == "theta") {
    config.subordinator.theta = parse_double(key, value);
  } else if (key == "epsilon") {
    config.epsilon = parse_double(key, value);
  } else if (key == "pbar") {
    config.pbar = parse_double(key, value);
  } else if (key == "delta_fine") {
    config.delta_fine = parse_double(key, value);
  } else if (key == "deltas") {
    config.delta_list = parse_delta_list(key, value);
  } else if (key == "paths") {
    config.n_paths = static_cast<std::size_t>(parse_u64(key, value));
  } else if (key == "horizon") {
    config.horizon = parse_double(key, value);
  } else if (key == "seed") {
    config.seed = parse_u64(key, value);
  } else {
    throw usage_error("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"tcsde experiment options"};
  std::string model, subordinator, config_file;
  double beta = 0, theta = 0, epsilon = 0, pbar = 0, delta_fine = 0,
         horizon = 0;
  std::vector<double> deltas;
  std::uint64_t paths = 0, seed = 0;
  app.add_option("--model", model);
  app.add_option("--subordinator", subordinator);
  app.add_option("--beta", beta);
  app.add_option("--theta", theta);
  app.add_option("--epsilon", epsilon);
  app.add_option("--pbar", pbar);
  app.add_option("--delta-fine", delta_fine);
  app.add_option("--deltas", deltas)->delimiter(',');
  app.add_option("--paths", paths);
  app.add_option("--horizon", horizon);
  app.add_option("--seed", seed);
  app.add_option("--config", config_file);

  std::vector<std::string> tokens(args.rbegin(), args.rend());
  try {
    app.parse(tokens);
  } catch (const CLI::ParseError& e) {
    throw usage_error(e.what());
  }

  ExperimentConfig config;  // defaults
  if (app.count("--config") > 0) {
    for (const auto& [key, value] : read_config_file(config_file)) {
      apply_config_entry(config, key, value);
    }
  }
  if (app.count("--model") > 0) config.model = model;
  if (app.count("--subordinator") > 0)
    config.subordinator.kind = kind_from_string(subordinator);
  if (app.count("--beta") > 0) config.subordinator.beta = beta;
  if (app.count("--theta") > 0) config.subordinator.theta = theta;
  if (app.count("--epsilon") > 0) config.epsilon = epsilon;
  if (app.count("--pbar") > 0) config.pbar = pbar;
  if (app.count("--delta-fine") > 0) config.delta_fine = delta_fine;
  if (app.count("--deltas") > 0) config.delta_list = deltas;
  if (app.count("--paths") > 0) config.n_paths = paths;
  if (app.count("--horizon") > 0) config.horizon = horizon;
  if (app.count("--seed") > 0) config.seed = seed;

  config.validate();
  return config;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  return nlohmann::json{
      {"model", config.model},
      {"subordinator",
       {{"kind", config.subordinator.kind_name()},
        {"beta", config.subordinator.beta},
        {"theta", config.subordinator.theta}}},
      {"epsilon", config.epsilon},
      {"pbar", config.pbar},
      {"delta_fine", config.delta_fine},
      {"deltas", config.delta_list},
      {"paths", config.n_paths},
      {"horizon", config.horizon},
      {"seed", config.seed},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  config.model = j.at("model").get<std::string>();
  const auto& sub = j.at("subordinator");
  config.subordinator.kind =
      kind_from_string(sub.at("kind").get<std::string>());
  config.subordinator.beta = sub.at("beta").get<double>();
  config.subordinator.theta = sub.at("theta").get<double>();
  config.epsilon = j.at("epsilon").get<double>();
  config.pbar = j.at("pbar").get<double>();
  config.delta_fine = j.at("delta_fine").get<double>();
  config.delta_list = j.at("deltas").get<std::vector<double>>();
  config.n_paths = j.at("paths").get<std::size_t>();
  config.horizon = j.at("horizon").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

nlohmann::json manifest_to_json(const RunManifest& manifest,
                                bool include_timing) {
  nlohmann::json j{
      {"config", config_to_json(manifest.config)},
      {"subcommand", manifest.subcommand},
      {"version", manifest.version},
  };
  if (include_timing) j["duration_seconds"] = manifest.duration_seconds;
  if (!manifest.report.rows.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : manifest.report.rows) {
      rows.push_back({{"delta", row.delta},
                      {"mean_sup_error", row.mean_sup_error},
                      {"rms_error", row.rms_error},
                      {"std_error", row.std_error},
                      {"n_blowups", row.n_blowups}});
    }
    j["rows"] = rows;
    j["regression"] = {{"slope", manifest.report.regression.slope},
                       {"intercept", manifest.report.regression.intercept},
                       {"r_squared", manifest.report.regression.r_squared}};
  }
  return j;
}

void emit_csv(const ErrorReport& report, std::uint64_t seed,
              std::ostream& os) {
  os << "delta,mean_sup_error,rms_error,std_error,log2_delta,log2_rms_error,"
        "n_blowups\n";
  for (const auto& row : report.rows) {
    os << format_g17(row.delta) << ',' << format_g17(row.mean_sup_error) << ','
       << format_g17(row.rms_error) << ',' << format_g17(row.std_error) << ','
       << format_g17(std::log2(row.delta)) << ','
       << format_g17(std::log2(row.rms_error)) << ',' << row.n_blowups << '\n';
  }
  os << "# slope=" << format_g17(report.regression.slope) << '\n';
  os << "# r_squared=" << format_g17(report.regression.r_squared) << '\n';
  os << "# seed=" << seed << '\n';
}

void emit_moments_csv(const MomentReport& report, std::uint64_t seed,
                      std::ostream& os) {
  os << "delta,truncated_max_sup_state,truncated_mean_sup_state,"
        "plain_n_blowups,plain_max_sup_state\n";
  for (const auto& row : report.rows) {
    os << format_g17(row.delta) << ','
       << format_g17(row.truncated_max_sup_state) << ','
       << format_g17(row.truncated_mean_sup_state) << ','
       << row.plain_n_blowups << ','
       << format_g17(row.plain_max_sup_state) << '\n';
  }
  os << "# seed=" << seed << '\n';
}

void emit_laplace_csv(const std::vector<LaplaceRow>& rows, std::uint64_t seed,
                      std::ostream& os) {
  os << "kind,beta,delta,r,empirical,analytic,std_error,z,within_3se\n";
  for (const auto& row : rows) {
    const double z = row.check.std_error > 0.0
                         ? (row.check.empirical - row.check.analytic) /
                               row.check.std_error
                         : 0.0;
    os << row.spec.kind_name() << ',' << format_g17(row.spec.beta) << ','
       << format_g17(row.delta) << ',' << format_g17(row.r) << ','
       << format_g17(row.check.empirical) << ','
       << format_g17(row.check.analytic) << ','
       << format_g17(row.check.std_error) << ',' << format_g17(z) << ','
       << (std::abs(z) <= 3.0 ? 1 : 0) << '\n';
  }
  os << "# seed=" << seed << '\n';
}

void emit_path_csv(const Trajectory& traj, const SdeModel& model,
                   std::uint64_t seed, std::ostream& os) {
  os << "rho,t_clipped,E_delta";
  for (int c = 0; c < model.dim_state; ++c) os << ",state_" << c;
  os << '\n';
  const TimeChangeGrid& grid = *traj.grid;
  for (std::size_t n = 0; n < traj.n_nodes(); ++n) {
    const double rho = grid.rho[n];
    const double t_clipped = std::min(model.t_start + rho, model.t_end);
    os << format_g17(rho) << ',' << format_g17(t_clipped) << ','
       << format_g17(static_cast<double>(n) * grid.delta);
    for (double v : traj.state(n)) os << ',' << format_g17(v);
    os << '\n';
  }
  os << "# seed=" << seed << '\n';
}

void write_manifest_sidecar(const std::string& data_path,
                            const nlohmann::json& manifest) {
  const std::string path = data_path + ".manifest.json";
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write manifest '" + path + "'");
  }
  out << manifest.dump(2) << '\n';
}

}  // namespace tcsde
