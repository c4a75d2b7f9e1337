#pragma once

#include <stdexcept>
#include <string>

namespace invforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or layer widths that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid user-supplied settings (rates, weights, keys).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. calling backward on a non-scalar node.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed dataset contents or files.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public DataError {
 public:
  using DataError::DataError;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

}  // namespace invforge
