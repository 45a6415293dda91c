#ifndef SPDELAB_ERRORS_HPP
#define SPDELAB_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace spdelab {

/// Failure categories. The CLI maps each category onto an exit code.
enum class ErrorKind {
  domain,            // argument outside the mathematical domain
  singularity,       // evaluation at a kernel singularity
  spectral,          // negative or non-finite spectral amplitude
  input,             // malformed or mismatched input data
  precondition,      // violated operation precondition
  blow_up,           // non-finite values during time stepping
  resolution,        // tabulated data too coarse for the request
  construction,      // infeasible Yamada-Watanabe family
  insufficient_data, // too few samples for a statistic
  oracle,            // quadrature did not converge
  parse,             // configuration / command-line parse failure
  extrapolation      // table lookup outside its range
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::spectral: return "spectral";
    case ErrorKind::input: return "input";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::blow_up: return "blow-up";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::construction: return "construction";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::oracle: return "oracle";
    case ErrorKind::parse: return "parse";
    case ErrorKind::extrapolation: return "extrapolation";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the stepper; carries the step at which the state stopped being finite.
class BlowUpError : public Error {
 public:
  BlowUpError(long step, const std::string& what)
      : Error(ErrorKind::blow_up, what + " (step " + std::to_string(step) + ")"), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace spdelab

#endif  // SPDELAB_ERRORS_HPP
