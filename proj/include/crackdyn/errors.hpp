#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crackdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `location()` is a line number for line-oriented
/// formats and a byte offset for expressions.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t location)
      : Error(what), location_(location) {}
  std::size_t location() const noexcept { return location_; }

private:
  std::size_t location_;
};

/// A structural invariant of a domain object does not hold.
class InvariantError : public Error {
public:
  InvariantError(std::string invariant, const std::string& detail)
      : Error(invariant + ": " + detail), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

private:
  std::string invariant_;
};

/// Arithmetic outside the domain of a function (division by zero, sqrt of a
/// negative number, negative friction threshold, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Iterative solver ran out of iterations.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace crackdyn
