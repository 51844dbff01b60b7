#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ilw {

/// Invalid arguments or configuration (bad grid size, unordered speeds, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The numerics broke down: non-finite state, failed eigensolve, singular system.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal warning sink. Functions that can detect questionable but legal
/// input (too-small box, large time step) append here when given one.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  bool empty() const noexcept { return warnings.empty(); }
};

}  // namespace ilw
