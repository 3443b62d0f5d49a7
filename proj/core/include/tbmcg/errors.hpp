#pragma once

#include <stdexcept>
#include <string>

namespace tbmcg {

/// Invalid hyperparameters, malformed config files, unknown names.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Bad runtime input: non-finite samples, dimension mismatches.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tbmcg
