#pragma once

#include <stdexcept>
#include <string>

namespace alphaforge {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Program construction
class InvalidInstruction : public Error {
 public:
  using Error::Error;
};
class EmptyProgram : public Error {
 public:
  using Error::Error;
};
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  explicit ParseError(const std::string& msg) : Error(msg), line_(-1) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Dimensions
class UnknownFeature : public Error {
 public:
  using Error::Error;
};

// Data
class SchemaError : public Error {
 public:
  using Error::Error;
};
class EmptyData : public Error {
 public:
  using Error::Error;
};
class InvalidParams : public Error {
 public:
  using Error::Error;
};

// Evaluation
class MissingFeature : public Error {
 public:
  using Error::Error;
};
class WindowNotInteger : public Error {
 public:
  using Error::Error;
};

// Metrics
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};
class EmptySeries : public Error {
 public:
  using Error::Error;
};

// Environment / search
class IllegalAction : public Error {
 public:
  using Error::Error;
};

// Strategy
class NoValidRows : public Error {
 public:
  using Error::Error;
};
class InsufficientStocks : public Error {
 public:
  using Error::Error;
};

// Configuration
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace alphaforge
