#pragma once

#include <stdexcept>
#include <string>

namespace haam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad shape, index out of range, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite value or diverged.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent files on disk.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace haam
