#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace cocite::cli {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Plain key=value lines; '#' starts a comment line; blank lines ignored.
KeyValues read_key_values(const std::filesystem::path& file);

// Turns config entries into "--key value" tokens. Keys may carry a "config."
// prefix (as in run manifests); other dotted keys and manifest bookkeeping
// keys are skipped.
std::vector<std::string> config_to_args(const KeyValues& kv);

}  // namespace cocite::cli
