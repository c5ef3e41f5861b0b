#pragma once
// Fixture helpers shared by the unit tests and the acceptance runner.

#include "cocite/corpus.hpp"

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace testing {

// Builds small corpora by id. References are added on first mention.
class CorpusBuilder {
public:
  explicit CorpusBuilder(int slice_year = 2000) : year_(slice_year) {}

  CorpusBuilder& ref(const std::string& id, int year, const std::string& journal, const std::string& subject = "S") {
    if (!index_.contains(id)) {
      index_[id] = static_cast<cocite::RefIndex>(refs_.size());
      refs_.push_back({id, year, journal, subject});
    }
    return *this;
  }

  CorpusBuilder& pub(const std::string& id, const std::vector<std::string>& ref_ids, std::uint64_t citations = 0,
                     const std::string& journal = "PUBJ") {
    cocite::Publication p{id, year_, journal, {}, citations};
    for (const auto& r : ref_ids) p.refs.push_back(index_.at(r));
    pubs_.push_back(std::move(p));
    return *this;
  }

  // One fresh reference per listed journal, all in `ref_year`.
  CorpusBuilder& pub_journals(const std::string& id, const std::vector<std::string>& journals, int ref_year = 1990) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < journals.size(); ++i) {
      ids.push_back(id + "/r" + std::to_string(i));
      ref(ids.back(), ref_year, journals[i]);
    }
    return pub(id, ids);
  }

  cocite::Corpus build(cocite::Background tag = cocite::Background::local) const {
    return cocite::Corpus(year_, tag, refs_, pubs_);
  }

private:
  int year_;
  std::vector<cocite::ReferenceRecord> refs_;
  std::vector<cocite::Publication> pubs_;
  std::map<std::string, cocite::RefIndex> index_;
};

class TempDir {
public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cocite-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& file, const std::string& text) {
  std::filesystem::create_directories(file.parent_path());
  std::ofstream(file, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace testing
