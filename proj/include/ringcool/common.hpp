#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringcool {

using Complex = std::complex<double>;

// Non-fatal regime warnings (Lamb-Dicke violated, linearization stretched, ...).
// Operations that can warn take an optional sink; nullptr discards.
using WarningList = std::vector<std::string>;

inline void warn(WarningList* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

// Bad user-supplied configuration (unknown key, bad axis name, malformed file).
// CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Explicit-stepper stability bound violated; message names the admissible dt.
// CLI maps this (and domain errors) to exit code 1.
struct StabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Truncated ladder too short for the requested evolution.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ringcool
