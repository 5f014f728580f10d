#pragma once

#include <stdexcept>
#include <string>

namespace alma {

/// Base for every error raised by the library. The CLI maps ScenarioError
/// to exit status 2 and everything else to 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range trace input. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class OrderingError : public ParseError {
public:
  using ParseError::ParseError;
};

class RangeError : public ParseError {
public:
  using ParseError::ParseError;
};

class EmptyInputError : public Error {
public:
  using Error::Error;
};

class TrainingError : public Error {
public:
  using Error::Error;
};

class InsufficientDataError : public Error {
public:
  using Error::Error;
};

class PlanningError : public Error {
public:
  using Error::Error;
};

class ConfigurationError : public Error {
public:
  using Error::Error;
};

class ScenarioError : public Error {
public:
  using Error::Error;
};

class ComparisonError : public Error {
public:
  using Error::Error;
};

}  // namespace alma
