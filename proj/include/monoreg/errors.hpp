#pragma once

#include <stdexcept>
#include <string>

namespace monoreg {

/// Raised for malformed configuration (bad flags, bad config files, missing tables).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised for malformed or out-of-domain input data (CSV rows, coordinates).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace monoreg
