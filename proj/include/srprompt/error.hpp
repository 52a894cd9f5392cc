#pragma once

#include <stdexcept>
#include <string>

namespace srprompt {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a serialized record or prompt cannot be decoded. `field()`
/// names the offending key or token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HookError : public std::runtime_error {
 public:
  HookError(const std::string& what, std::string raw_output, int exit_status)
      : std::runtime_error(what),
        raw_output_(std::move(raw_output)),
        exit_status_(exit_status) {}

  const std::string& raw_output() const noexcept { return raw_output_; }
  int exit_status() const noexcept { return exit_status_; }

 private:
  std::string raw_output_;
  int exit_status_;
};

}  // namespace srprompt
