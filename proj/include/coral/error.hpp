#pragma once

#include <stdexcept>
#include <string>

namespace coral {

// Malformed or degenerate input data (CLI exit code 2).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameters or configuration (CLI exit code 3).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace coral
