#pragma once

#include <stdexcept>
#include <string>

namespace gnls {

/// Invalid parameters or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The bound-selection procedure has no admissible parameters (e.g. r too small).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trajectory exceeded the configured L2 cap.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time, double l2sq)
      : std::runtime_error(what), time_(time), l2sq_(l2sq) {}
  double time() const noexcept { return time_; }
  double l2sq() const noexcept { return l2sq_; }

 private:
  double time_;
  double l2sq_;
};

}  // namespace gnls
