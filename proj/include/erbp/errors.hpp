#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace erbp {

// Invalid dimensions, out-of-range arguments, inconsistent run configuration.
// CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failures: missing, unreadable or unwritable paths. Exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file contents; carries the 1-based offending line when known.
class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : IoError(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace erbp
