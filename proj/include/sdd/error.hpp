#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments, detected before any work is done.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Anomalous evidence does not diverge more than normal evidence, so no
/// threshold between the classes exists.
class SeparationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line()` is 1-based and counts the header.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sdd
