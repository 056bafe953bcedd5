#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eeggcn {

// All library failures derive from Error so callers can catch one type and
// still branch on the specific kind when they care.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SignalTooShortError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class OracleScopeError : public Error {
 public:
  using Error::Error;
};

class DegenerateChannelError : public Error {
 public:
  DegenerateChannelError(std::size_t channel, const std::string& what)
      : Error(what), channel_(channel) {}
  std::size_t channel() const { return channel_; }

 private:
  std::size_t channel_;
};

// Token positions are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : Error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace eeggcn
