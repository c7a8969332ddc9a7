#pragma once

#include <stdexcept>
#include <string>

namespace spsel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (bad spec values, out-of-range weights).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Incompatible operand shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Files that cannot be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data: Matrix Market, CSV, model JSON.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input with the wrong schema version or content.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Data that cannot be processed (degenerate label space, empty sets).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A DIA conversion whose padded band storage would exceed the guard.
class DiaBlowupError : public Error {
 public:
  using Error::Error;
};

}  // namespace spsel
