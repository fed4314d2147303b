#pragma once

#include <stdexcept>
#include <string>

namespace riskcal {

// Malformed input syntax (bad JSON line, bad config file).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed input violating a documented invariant (probability out of
// range, duplicate record id, empty token list, ...).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad run configuration (alpha outside (0,1), unknown preset, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace riskcal
