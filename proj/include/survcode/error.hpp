#pragma once

#include <stdexcept>
#include <string>

namespace survcode {

// Base of every error the toolkit throws. The C API maps each subclass
// onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input files: CSV, JSON config, interchange lines, bundles.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a data contract (duplicate ids,
// unknown label codes, degenerate marginals, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace survcode
