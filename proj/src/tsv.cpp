#include "cocite/tsv.hpp"

#include "cocite/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace cocite::tsv {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void read(const std::filesystem::path& file, std::span<const std::string_view> columns,
          const std::function<void(std::span<const std::string_view>, std::size_t)>& row) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open " + file.string());

  std::vector<std::string_view> fields;
  fields.reserve(columns.size() + 1);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    fields.clear();
    std::string_view rest(line);
    for (;;) {
      const auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }

    if (!header_seen) {
      header_seen = true;
      bool ok = fields.size() == columns.size();
      for (std::size_t i = 0; ok && i < columns.size(); ++i) ok = trim(fields[i]) == columns[i];
      if (!ok) {
        std::string expected;
        for (auto c : columns) expected += (expected.empty() ? "" : "\\t") + std::string(c);
        throw DataError::at(file.string(), line_no, "header must be '" + expected + "'");
      }
      continue;
    }
    if (fields.size() != columns.size()) {
      throw DataError::at(file.string(), line_no,
                          "expected " + std::to_string(columns.size()) + " columns, found " +
                              std::to_string(fields.size()));
    }
    row(fields, line_no);
  }
  if (!header_seen) throw DataError::at(file.string(), 1, "missing header row");
}

int parse_int(std::string_view field, const std::filesystem::path& file, std::size_t line,
              std::string_view what) {
  field = trim(field);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw DataError::at(file.string(), line,
                        "non-integer " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

std::uint64_t parse_count(std::string_view field, const std::filesystem::path& file,
                          std::size_t line, std::string_view what) {
  field = trim(field);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw DataError::at(file.string(), line,
                        "non-negative integer expected for " + std::string(what) + ", got '" +
                            std::string(field) + "'");
  }
  return value;
}

}  // namespace cocite::tsv
