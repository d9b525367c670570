#pragma once

#include <stdexcept>
#include <string>

namespace sdc {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric argument is outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Grid/image dimensions are invalid or inconsistent.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The stereo geometry variant does not support the requested operation.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// An operation that needs at least one valid sample received none.
class NoDataError : public Error {
 public:
  using Error::Error;
};

/// Input is degenerate for the algorithm (e.g. collinear RANSAC samples).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (missing inputs, bad key/value, bad scene spec).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdc
