#pragma once

#include <stdexcept>
#include <string>

namespace steerbench {

// Base for all library errors so callers can catch the whole family.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class InsufficientHistoryError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class FixtureMissingError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class EndpointError : public Error {
 public:
  explicit EndpointError(const std::string& msg, int status = 0)
      : Error(msg), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class InfeasibleManeuverError : public Error {
 public:
  using Error::Error;
};

class InsufficientChunkError : public Error {
 public:
  using Error::Error;
};

// Raised when every trajectory point falls outside the camera frustum.
class EmptyOverlayError : public Error {
 public:
  using Error::Error;
};

}  // namespace steerbench
