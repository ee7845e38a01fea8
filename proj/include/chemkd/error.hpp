#pragma once

#include <stdexcept>
#include <string>

namespace chemkd {

/// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a precondition (bad index, mismatched dimension, bad flag).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data is malformed: unparseable SMILES, non-finite coordinates, bad labels.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A binary file is corrupt: wrong magic, unsupported version, truncation.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

/// The operating system refused a read, write, rename or open.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chemkd
