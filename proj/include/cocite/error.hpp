#pragma once

#include <stdexcept>
#include <string>

namespace cocite {

// Input data violates a schema or a corpus invariant. The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;

  // "<file>:<line>: <message>"
  static DataError at(const std::string& file, std::size_t line, const std::string& message);
};

// A configuration value is outside its allowed set.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cocite
