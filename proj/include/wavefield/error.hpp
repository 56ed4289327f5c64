#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavefield {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a domain invariant (negative temperature, empty trajectory, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, const std::string& source = {})
      : Error(compose(message, line, source)), message_(message), line_(line) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  static std::string compose(const std::string& message, std::size_t line, const std::string& source) {
    std::string out = source.empty() ? std::string() : source + ": ";
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    return out + message;
  }

  std::string message_;
  std::size_t line_;
};

/// Scene schema violation; the message starts with the offending field path.
class SceneError : public Error {
 public:
  SceneError(const std::string& field_path, const std::string& what)
      : Error(field_path + ": " + what), field_path_(field_path) {}

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

/// A source segment moves at or above the speed of sound.
class SupersonicError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wavefield
