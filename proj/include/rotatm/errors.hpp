#pragma once

#include <stdexcept>
#include <string>

namespace rotatm {

/// Base of every error raised by the toolkit. `kind()` is the short tag used
/// in structured CLI error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

/// Iteration, quadrature or factorization failed to reach its tolerance.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, double achieved = 0.0)
      : Error("numeric", what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Level set has no bounded component (case L) or is otherwise unusable.
class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what) : Error("geometry", what) {}
};

class UnboundedDomainError : public GeometryError {
 public:
  explicit UnboundedDomainError(const std::string& what) : GeometryError(what) {}
};

/// Flow-map failures: trajectory left the evaluable region, Jacobian lost
/// positivity, or the inverse iteration is not a contraction.
class FlowError : public Error {
 public:
  FlowError(const std::string& kind, const std::string& what, double time = 0.0)
      : Error(kind, what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error("precondition", what) {}
};

}  // namespace rotatm
