#pragma once

#include <stdexcept>
#include <string>

namespace wills {

/// Error taxonomy shared by every module. The CLI maps kinds to exit codes:
/// input-shaped problems exit 2, numerical/convergence problems exit 3.
enum class ErrorKind {
  input,         // malformed arguments, dimension mismatch, bad body spec
  infeasible,    // empty intersection, unbounded polytope
  convergence,   // iteration budget exhausted
  tuning,        // sampler auto-tuning failed
  conditioning,  // ill-conditioned design matrix
  boundary_case, // point too close to a face-region boundary; caller resamples
  degenerate,    // zero-variance law or similar
  proposal,      // importance-sampling proposal quality too low
  band_width,    // too few hits in a distance band
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

} // namespace wills
