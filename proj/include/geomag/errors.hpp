#pragma once

#include <stdexcept>
#include <string>

namespace geomag {

// Base of every error raised by the library. The CLI maps ConfigError to
// exit code 1 and every other Error to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced while evaluating a field or path.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double parameter)
      : Error(what), parameter_(parameter) {}
  double parameter() const { return parameter_; }

 private:
  double parameter_;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// Energy too close to a channel threshold to classify the regime.
class ThresholdError : public Error {
 public:
  using Error::Error;
};

class InsufficientPropagationError : public Error {
 public:
  using Error::Error;
};

class WrapAroundError : public Error {
 public:
  WrapAroundError(const std::string& what, double guard_norm)
      : Error(what), guard_norm_(guard_norm) {}
  double guard_norm() const { return guard_norm_; }

 private:
  double guard_norm_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace geomag
