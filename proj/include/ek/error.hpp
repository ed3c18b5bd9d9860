#pragma once

#include <stdexcept>
#include <string>

namespace ek {

// Bad argument to an operation (out of range, mismatched sizes, ...).
// The CLI maps this to exit status 2.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Parameters are individually valid but violate a structural constraint
// (e.g. a ladder whose first interval exceeds exp(sqrt(log X))).
class ConstraintError : public ParameterError {
 public:
  explicit ConstraintError(const std::string& what) : ParameterError(what) {}
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

}  // namespace ek
