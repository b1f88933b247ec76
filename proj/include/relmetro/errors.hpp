#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace relmetro {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModeOutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

/// The formula being evaluated does not cover the given input (e.g. displaced states).
class UnsupportedRegime : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// Zero (or negative) Fisher information: nothing can be estimated.
class NoInformation : public Error {
 public:
  using Error::Error;
};

class MissingFirstOrder : public Error {
 public:
  using Error::Error;
};

class InvalidScenario : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or numeric policy. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Finite-difference ladder did not settle. Carries the ladder for diagnosis.
class NoPlateau : public Error {
 public:
  NoPlateau(const std::string& what, std::vector<double> steps, std::vector<double> estimates)
      : Error(what), steps_(std::move(steps)), estimates_(std::move(estimates)) {}

  const std::vector<double>& steps() const { return steps_; }
  const std::vector<double>& estimates() const { return estimates_; }

 private:
  std::vector<double> steps_;
  std::vector<double> estimates_;
};

}  // namespace relmetro
