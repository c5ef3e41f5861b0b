#pragma once

#include <optional>
#include <string>

namespace cocite {

// Shortest round-trip decimal representation; identical bytes for identical doubles.
std::string format_double(double value);

// "NA" for an absent value.
std::string format_optional(const std::optional<double>& value);

}  // namespace cocite
