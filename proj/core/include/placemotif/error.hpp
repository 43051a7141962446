#pragma once

#include <stdexcept>
#include <string>

namespace placemotif {

enum class ErrorCode {
  InvalidArgument,
  Config,
  Io,
  Parse,
  NotAMotif,
  ProximityUnavailable,
  BudgetExceeded,
  Undefined,
};

// Single exception type for the library; `code()` lets callers map failures
// onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace placemotif
