#pragma once

#include <stdexcept>
#include <string>

namespace vtx {

/// Invalid input: bad config value, unit mismatch, violated type invariant.
/// `path()` names the offending field, e.g. "vesicle.d_in".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string path, const std::string& what)
      : std::invalid_argument(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Failure while integrating or evaluating a solution (instability, quadrature).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vtx
