#pragma once

#include <stdexcept>
#include <string>

namespace gtsi {

// Exit-code categories used by the CLI. Library code throws, main() maps.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,   // unclassified
  kExitConfig = 2,    // bad config file, unknown key, invalid value, infeasible construction
  kExitDimension = 3, // mismatched vector/matrix dimensions
  kExitNumeric = 4,   // NaN/Inf detected in an iterative solver
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return kExitFailure; }
};

struct ConfigError : Error {
  using Error::Error;
  int exit_code() const override { return kExitConfig; }
};

struct DimensionError : Error {
  using Error::Error;
  int exit_code() const override { return kExitDimension; }
};

// Carries a rendered per-iteration trace so a diverging run can be diagnosed
// from the error message alone.
struct NumericError : Error {
  explicit NumericError(const std::string& what, std::string trace = {})
      : Error(what + (trace.empty() ? "" : "\n" + trace)) {}
  int exit_code() const override { return kExitNumeric; }
};

}  // namespace gtsi
