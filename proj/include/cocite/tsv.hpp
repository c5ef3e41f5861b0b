#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cocite::tsv {

// Calls `row` for every data line after checking the header matches `columns`
// exactly. Fields are split on '\t'; a trailing '\r' is stripped; blank lines
// are skipped. Wrong column counts raise DataError naming file and line.
void read(const std::filesystem::path& file, std::span<const std::string_view> columns,
          const std::function<void(std::span<const std::string_view> fields, std::size_t line)>& row);

int parse_int(std::string_view field, const std::filesystem::path& file, std::size_t line,
              std::string_view what);
std::uint64_t parse_count(std::string_view field, const std::filesystem::path& file,
                          std::size_t line, std::string_view what);

std::string_view trim(std::string_view s);

}  // namespace cocite::tsv
