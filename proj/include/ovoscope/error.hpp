#pragma once

#include <stdexcept>
#include <string>

namespace ovoscope {

// Root of every error the library throws.
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

enum class ParseErrorKind {
  UnknownMagic,
  MalformedHeader,
  UnsupportedMaxval,
  Truncated,
  BadSample,
};

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

// Thresholding produced no object pixels.
class NoObjectError : public Error {
 public:
  NoObjectError() : Error("no object found") {}
  using Error::Error;
};

// A histogram with zero mass, or zero variance where a standardized moment is required.
class DegenerateHistogramError : public Error {
 public:
  using Error::Error;
};

}  // namespace ovoscope
