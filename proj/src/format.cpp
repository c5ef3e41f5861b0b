#include "cocite/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace cocite {

std::string format_double(double value) {
  if (value == 0.0) return "0";  // folds -0
  if (std::isnan(value)) return "nan";
  std::array<char, 32> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), result.ptr};
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string("NA");
}

}  // namespace cocite
