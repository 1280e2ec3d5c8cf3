#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace stride_lab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No solid ground with the required clearance inside the gap-shift window.
class InfeasibleStep : public Error {
 public:
  using Error::Error;
};

/// Step duration too short for the hyperbolic placement law (sinh underflow).
class DegenerateStepDuration : public Error {
 public:
  using Error::Error;
};

class NoFixedPoint : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class EmptyWindow : public Error {
 public:
  using Error::Error;
};

class EmptyLog : public Error {
 public:
  using Error::Error;
};

class ZeroDistance : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

/// A configuration value outside its admissible range. `field` names the key.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace stride_lab
