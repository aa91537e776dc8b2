#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sks {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An update record arrived out of sequence for its ego.
class ReplayGap : public Error {
 public:
  using Error::Error;
};

class UnknownUser : public Error {
 public:
  using Error::Error;
};

/// normalized_weight(i, j) asked for a j outside i's neighbor set.
class UndefinedPair : public Error {
 public:
  using Error::Error;
};

class AccessDenied : public Error {
 public:
  using Error::Error;
};

class ServiceUnavailable : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace sks
