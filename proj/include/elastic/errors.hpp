#pragma once

#include <stdexcept>
#include <string>

namespace elastic {

// Base of every error raised by the library. The CLI maps subclasses of
// DataError to exit code 2 and InvariantError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInputError : public DataError {
 public:
  using DataError::DataError;
};

/// Zero-variance input where a normalized quantity is required.
class DegenerateSeriesError : public DataError {
 public:
  using DataError::DataError;
};

class ParameterError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyGridError : public DataError {
 public:
  using DataError::DataError;
};

/// The count threshold removes a corner cell, so no path survives.
class OverThresholdError : public DataError {
 public:
  OverThresholdError(const std::string& what, long long max_theta)
      : DataError(what), max_admissible_theta(max_theta) {}
  long long max_admissible_theta;
};

/// A learning problem with nothing to learn, e.g. a single class.
class DegenerateProblemError : public DataError {
 public:
  using DataError::DataError;
};

class KernelError : public DataError {
 public:
  using DataError::DataError;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace elastic
