#pragma once

#include <stdexcept>
#include <string>

namespace thinfilm {

//! Bad argument values (sizes, signs, ranges).
struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

//! Geometry that does not fit the domain (supports, weights, probes).
struct GeometryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

//! Field violating the admissible cone (negative or non-finite entries).
struct AdmissibilityError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

//! A solver invariant broke mid-run (NaN, floor loss); the run aborts.
struct InvariantFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Config file rejected; carries a 1-based line number for the diagnostic
//! (0 when the problem is a missing section or key rather than a bad line).
struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& what_)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what_ : what_),
        line(line_) {}
};

}  // namespace thinfilm
