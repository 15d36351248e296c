#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wgt {

// Bad argument shapes, unknown agent ids, violated preconditions.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Scenario or config file cannot be used as given.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weight factors that increase between iterations.
class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace wgt
