// Compares the serial reference driver against the OpenMP path loop on the
// same experiment and verifies that the two reports agree bit for bit.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tcsde/harness.hpp"

namespace {

double time_it(const char* label, tcsde::ErrorReport (*fn)(const tcsde::ExperimentConfig&),
               const tcsde::ExperimentConfig& config, tcsde::ErrorReport& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = fn(config);
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;
  std::cout << label << ": " << dt.count() << " s\n";
  return dt.count();
}

bool reports_identical(const tcsde::ErrorReport& a,
                       const tcsde::ErrorReport& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (std::memcmp(&a.rows[i].mean_sup_error, &b.rows[i].mean_sup_error,
                    sizeof(double)) != 0 ||
        std::memcmp(&a.rows[i].std_error, &b.rows[i].std_error,
                    sizeof(double)) != 0) {
      return false;
    }
  }
  return std::memcmp(&a.regression.slope, &b.regression.slope,
                     sizeof(double)) == 0;
}

}  // namespace

int main(int argc, char** argv) try {
  tcsde::ExperimentConfig config;
  config.n_paths = 50;
  config.delta_fine = 1e-5;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    const std::string value = argv[i + 1];
    if (key == "--paths") config.n_paths = std::stoul(value);
    else if (key == "--delta-fine") config.delta_fine = std::stod(value);
    else if (key == "--model") config.model = value;
    else if (key == "--seed") config.seed = std::stoull(value);
    else {
      std::cerr << "unknown option " << key << "\n";
      return 2;
    }
  }
  // Keep only step sizes that are >= 2x integer multiples of the reference.
  std::erase_if(config.delta_list, [&](double d) {
    const double k = std::round(d / config.delta_fine);
    return k < 2.0 || std::abs(d / config.delta_fine - k) > 1e-9 * k;
  });

#ifdef _OPENMP
  std::cout << "threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "threads: 1 (OpenMP disabled)\n";
#endif
  std::cout << "model=" << config.model << " paths=" << config.n_paths
            << " delta_fine=" << config.delta_fine << "\n";

  tcsde::ErrorReport serial, parallel;
  const double ts = time_it("serial  ", tcsde::run_experiment_serial, config, serial);
  const double tp = time_it("parallel", tcsde::run_experiment, config, parallel);

  std::cout << "speedup: " << ts / tp << "x\n";
  if (!reports_identical(serial, parallel)) {
    std::cout << "MISMATCH: serial and parallel reports differ\n";
    return 1;
  }
  std::cout << "reports identical: yes\n";
  std::cout << "slope=" << serial.regression.slope << "\n";
  return 0;
} catch (const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}
