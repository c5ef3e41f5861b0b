#include "config.hpp"

#include "cocite/error.hpp"
#include "cocite/tsv.hpp"

#include <fstream>

namespace cocite::cli {

KeyValues read_key_values(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = tsv::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos || tsv::trim(t.substr(0, eq)).empty()) {
      throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    kv.emplace_back(std::string(tsv::trim(t.substr(0, eq))), std::string(tsv::trim(t.substr(eq + 1))));
  }
  return kv;
}

std::vector<std::string> config_to_args(const KeyValues& kv) {
  std::vector<std::string> args;
  for (const auto& [raw_key, value] : kv) {
    std::string key = raw_key;
    if (key.starts_with("config.")) key = key.substr(7);
    if (key.find('.') != std::string::npos || key == "command" || key == "tool_version") continue;
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

}  // namespace cocite::cli
