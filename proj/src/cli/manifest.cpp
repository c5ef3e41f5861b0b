#include "manifest.hpp"

#include "cocite/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

namespace cocite::cli {

void RunManifest::write(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  out << "# cocite run manifest\n";
  out << "tool_version=" << tool_version << '\n';
  out << "command=" << command << '\n';
  for (const auto& [k, v] : config) out << "config." << k << '=' << v << '\n';
  for (const auto& [k, v] : digests) out << "digest." << k << '=' << v << '\n';
  for (const auto& [k, v] : timings) out << "timing." << k << '=' << v << '\n';
  for (const auto& [k, v] : diagnostics) out << "diag." << k << '=' << v << '\n';
}

RunManifest RunManifest::read(const std::filesystem::path& file) {
  RunManifest m;
  for (auto& [k, v] : read_key_values(file)) {
    const auto strip = [&](std::string_view prefix) { return k.substr(prefix.size()); };
    if (k == "tool_version") m.tool_version = v;
    else if (k == "command") m.command = v;
    else if (k.starts_with("config.")) m.config.emplace_back(strip("config."), v);
    else if (k.starts_with("digest.")) m.digests.emplace_back(strip("digest."), v);
    else if (k.starts_with("timing.")) m.timings.emplace_back(strip("timing."), v);
    else if (k.starts_with("diag.")) m.diagnostics.emplace_back(strip("diag."), v);
  }
  if (m.command.empty()) throw ConfigError(file.string() + ": manifest has no command");
  return m;
}

std::string sha256_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open " + file.string());

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xF]);
  }
  return hex;
}

}  // namespace cocite::cli
