#pragma once

#include <stdexcept>
#include <string>

namespace dyncomm {

/// Base class for all recoverable failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input: unparsable files, bad edge events,
/// inconsistent result/ground-truth files.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Non-finite optimization state or a zero multiplicative-update denominator.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File system failure (unreadable input, uncreatable output).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dyncomm
