#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoanneal {

// Base of every library failure; `kind()` is the machine-readable tag the CLI
// reports in its error JSON.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid-argument"; }
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "parse-error"; }

 private:
  std::size_t line_;
};

class SizeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "size-error"; }
};

class IntegrationError : public Error {
 public:
  IntegrationError(double time, const std::string& what)
      : Error(what + " at t=" + std::to_string(time)), time_(time) {}
  double time() const noexcept { return time_; }
  const char* kind() const noexcept override { return "integration-error"; }

 private:
  double time_;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate"; }
};

}  // namespace geoanneal
