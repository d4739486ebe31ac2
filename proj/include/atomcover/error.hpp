#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace atomcover {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or data that violate a documented precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Periodic flags set on a cell whose lattice vectors are linearly dependent.
class CellError : public Error {
 public:
  using Error::Error;
};

/// Coincident atoms (zero interatomic distance) found while building
/// descriptors.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Malformed extended-XYZ input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace atomcover
