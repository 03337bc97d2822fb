#pragma once

#include <stdexcept>
#include <string>

namespace clicksim {

// Truncated mass of a photon-number distribution exceeded the allowed
// tolerance.  Usually means n_max is too small for the requested mean.
class TailToleranceError : public std::runtime_error {
 public:
  TailToleranceError(const std::string& msg, double tail_mass)
      : std::runtime_error(msg), tail_mass_(tail_mass) {}
  double tail_mass() const { return tail_mass_; }

 private:
  double tail_mass_;
};

// Click statistics too degenerate for the requested witness: no clicks at
// all, saturated detectors, or a vanishing denominator.  Carries the
// offending value so callers can report it.
class DegenerateStatisticsError : public std::runtime_error {
 public:
  DegenerateStatisticsError(const std::string& msg, double value)
      : std::runtime_error(msg), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

// The analytic engine cannot enumerate this many unbalanced modes.
class ModeCountError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration (file contents or option combination).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace clicksim
