#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace literalis {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A JSONL record violated the corpus schema or one of its invariants.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, std::size_t line, const std::string& what)
      : Error(format(field, line, what)), field_(std::move(field)), line_(line), detail_(what) {}

  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }
  /// The message without the line/field prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(const std::string& field, std::size_t line, const std::string& what) {
    std::string out = "line " + std::to_string(line);
    if (!field.empty()) out += ", field '" + field + "'";
    return out + ": " + what;
  }

  std::string field_;
  std::size_t line_;
  std::string detail_;
};

/// Input is structurally valid but a computation is undefined on it
/// (empty token sequence, zero variance, empty intersection, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public DomainError {
 public:
  using DomainError::DomainError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace literalis
