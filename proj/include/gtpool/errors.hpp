#pragma once

#include <stdexcept>
#include <string>

namespace gtpool {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class IndexError : public Error {
public:
  using Error::Error;
};

class ArgumentError : public Error {
public:
  using Error::Error;
};

/// Non-finite values where finite ones are required (diverged loss, NaN gradient).
class NumericError : public Error {
public:
  using Error::Error;
};

/// Malformed or missing input file.
class FormatError : public Error {
public:
  using Error::Error;
};

/// Input files that parse but contradict each other.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

/// Invalid user configuration (unknown key, out-of-range value, impossible request).
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace gtpool
