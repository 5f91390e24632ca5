#pragma once

#include <stdexcept>
#include <string>

namespace tcsde {

// Bad command line / config file input. CLI maps this to exit code 2.
class usage_error : public std::runtime_error {
 public:
  explicit usage_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Admissible but inconsistent parameter combination (e.g. a step size too
// coarse for the truncation policy). CLI maps this to exit code 3.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tcsde
