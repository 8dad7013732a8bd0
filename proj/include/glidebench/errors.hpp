#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace glidebench {

// Malformed JSON or a structurally wrong document (missing keys, wrong types,
// unknown keys). Carries the byte position when the JSON parser reports one.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, std::size_t byte = 0, std::size_t line = 0,
                      std::size_t column = 0)
      : std::runtime_error(what), byte_(byte), line_(line), column_(column) {}

  std::size_t byte() const noexcept { return byte_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t byte_;
  std::size_t line_;
  std::size_t column_;
};

// A well-formed document that violates one or more invariants.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "validation failed";
    for (const auto& s : v) out += "; " + s;
    return out;
  }

  std::vector<std::string> violations_;
};

// Submission refused by the factory; reason is a stable machine token
// ("benchmarks_disabled", "entry_full", "unknown_entry", ...).
class Rejection : public std::runtime_error {
 public:
  Rejection(std::string reason, const std::string& detail)
      : std::runtime_error(reason + ": " + detail), reason_(std::move(reason)) {}

  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace glidebench
