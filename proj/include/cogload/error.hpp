#pragma once

#include <stdexcept>
#include <string>

namespace cogload {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes (config 2, data 3, numeric 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of a closed-form feature.
class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace cogload
