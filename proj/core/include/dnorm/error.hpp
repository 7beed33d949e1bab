#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dnorm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain argument (bad depth, bad intrinsics, bad parameter).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// Two grids that must share a shape do not.
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

/// A magnitude-based operation was handed unit-normalized vectors.
class NormalizedInputError : public Error {
 public:
  using Error::Error;
};

/// A reduction was asked for over zero valid pixels.
class EmptyValidSetError : public Error {
 public:
  using Error::Error;
};

/// A metric has no jointly valid pixels to average over.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, created, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents. Carries the byte offset where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace dnorm
