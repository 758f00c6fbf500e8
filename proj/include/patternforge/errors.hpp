#pragma once

#include <stdexcept>
#include <string>

namespace patternforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown pattern id or malformed catalog entry.
class CatalogError : public Error {
 public:
  using Error::Error;
};

/// A pattern could not produce a valid image (e.g. degenerate output size).
class PatternError : public Error {
 public:
  using Error::Error;
};

/// Invalid forge / selection / CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed descriptor file. The message names the failing field.
class CodecError : public Error {
 public:
  using Error::Error;
};

/// Dimension or id-set mismatch between matrices / match lists.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or malformed metric / manifest inputs.
class InputError : public Error {
 public:
  using Error::Error;
};

/// No prompt pair satisfies the requested selection mode.
class SelectionError : public Error {
 public:
  using Error::Error;
};

class ImageIoError : public Error {
 public:
  using Error::Error;
};

}  // namespace patternforge
