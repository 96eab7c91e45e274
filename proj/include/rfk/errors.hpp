#pragma once

#include <stdexcept>
#include <string>

namespace rfk {

// Error families map to CLI exit codes: validation -> 2, I/O -> 3, config -> 4.

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input content (bad JSON, bad PNG, bad magic). Still exit code 2.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rfk
