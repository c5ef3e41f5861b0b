#pragma once

#include "config.hpp"

#include <filesystem>
#include <string>

namespace cocite::cli {

// run.manifest: everything needed to repeat a run. Written as key=value lines
// so it can be fed back through --config or `rerun`.
struct RunManifest {
  std::string tool_version;
  std::string command;
  KeyValues config;       // option name -> value, as parsed
  KeyValues digests;      // input option -> sha256 of the file
  KeyValues timings;      // stage -> seconds
  KeyValues diagnostics;  // counter -> value

  void write(const std::filesystem::path& file) const;
  static RunManifest read(const std::filesystem::path& file);
};

std::string sha256_file(const std::filesystem::path& file);

}  // namespace cocite::cli
