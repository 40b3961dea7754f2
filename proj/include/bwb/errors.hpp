#pragma once

#include <stdexcept>
#include <string>

namespace bwb {

// Bad input or violated precondition (CLI exit code 2).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerical solver failed to reach its tolerance (CLI exit code 3).
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double residual = -1)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

}  // namespace bwb
