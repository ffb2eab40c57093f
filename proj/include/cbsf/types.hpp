#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cbsf {

// Dense, zero-based positions into a RatingMatrix. External ids from the
// rating files are mapped onto these in ascending id order, so comparing
// indices is the same as comparing ids.
using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;

using ExternalId = std::int64_t;

// Base for every error raised by the library; the CLI maps subclasses to
// exit-code categories.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace cbsf
