#pragma once

#include <stdexcept>
#include <string>

namespace oirrt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidStart : public Error {
public:
  using Error::Error;
};

/// The informed subset is empty: cBest is below the straight-line distance.
class EmptyRegion : public Error {
public:
  using Error::Error;
};

class CycleError : public Error {
public:
  using Error::Error;
};

class NoParent : public Error {
public:
  using Error::Error;
};

class UnknownKind : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace oirrt
