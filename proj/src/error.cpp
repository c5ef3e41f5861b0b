#include "cocite/error.hpp"

namespace cocite {

DataError DataError::at(const std::string& file, std::size_t line, const std::string& message) {
  return DataError(file + ":" + std::to_string(line) + ": " + message);
}

}  // namespace cocite
