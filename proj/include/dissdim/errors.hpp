#pragma once

#include <stdexcept>
#include <string>

namespace dissdim {

/// Input rejected by a precondition check (bad parameters, malformed file,
/// inconsistent shapes). The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A test function or cylinder reaches too close to the edge of the sampled
/// domain. Sweeps skip these instead of failing.
class MarginError : public ValidationError {
 public:
  explicit MarginError(const std::string& what) : ValidationError(what) {}
};

/// A computation produced a non-finite value or violated a stability bound.
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace dissdim
