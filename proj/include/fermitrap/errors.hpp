#ifndef FERMITRAP_ERRORS_HPP
#define FERMITRAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fermitrap {

// Interaction model violates the consistency condition |V_b| <= |hw + V_a|
// (or is otherwise outside the solvable family).
class ModelInvalidError : public std::runtime_error {
 public:
  explicit ModelInvalidError(const std::string& what) : std::runtime_error(what) {}
};

// A quadrature or eigensolver failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Bad run configuration (CLI / JSON layer).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fermitrap

#endif  // FERMITRAP_ERRORS_HPP
