#ifndef BROYDEN_LAB_ERRORS_HPP
#define BROYDEN_LAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace broyden_lab {

/// Operand dimensions disagree (or a zero dimension was requested).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix failed the symmetric positive definite check.
class NotSpdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the mathematical domain of the operation
/// (u = 0 where a direction is required, tau outside [0, 1], ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Wrong operator role, e.g. a primal->dual operator where a dual->primal one
/// is expected.
class RoleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The iteration produced a non-finite iterate.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Malformed experiment or instance description.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace broyden_lab

#endif  // BROYDEN_LAB_ERRORS_HPP
