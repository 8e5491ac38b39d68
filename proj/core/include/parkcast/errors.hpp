#pragma once

#include <stdexcept>
#include <string>

namespace parkcast {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, parameters, or model/shape mismatches. Exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

/// Bad or missing input data, unreadable files, misaligned grids,
/// missing upstream artifacts. Exit code 3.
struct DataError : Error {
  using Error::Error;
};

/// A data file whose header does not match the expected schema.
struct SchemaError : DataError {
  using DataError::DataError;
};

/// Numerical failure during training or evaluation (NaN loss etc). Exit code 4.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace parkcast
