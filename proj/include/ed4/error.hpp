#pragma once

#include <stdexcept>
#include <string>

namespace ed4 {

// Every library failure carries a category string that the CLI maps to an
// exit code and the Python module forwards verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

// Violated precondition on a mathematical operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

// Malformed dataset content (manifest lines, undecodable images).
class DataError : public Error {
 public:
  explicit DataError(const std::string& message) : Error("data", message) {}
};

}  // namespace ed4
