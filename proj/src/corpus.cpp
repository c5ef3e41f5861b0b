#include "cocite/corpus.hpp"

#include "cocite/error.hpp"
#include "cocite/tsv.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <unordered_set>

namespace cocite {

std::string_view to_string(Background b) { return b == Background::local ? "local" : "global"; }

Background parse_background(std::string_view s) {
  if (s == "local") return Background::local;
  if (s == "global") return Background::global;
  throw ConfigError("background must be 'local' or 'global', got '" + std::string(s) + "'");
}

Corpus::Corpus(int slice_year, Background tag, std::vector<ReferenceRecord> references,
               std::vector<Publication> publications)
    : slice_year_(slice_year),
      background_(tag),
      references_(std::move(references)),
      publications_(std::move(publications)) {
  ref_lookup_.reserve(references_.size());
  for (std::size_t i = 0; i < references_.size(); ++i) {
    const auto& r = references_[i];
    if (r.ref_id.empty()) throw DataError("reference with empty id");
    if (r.journal_id.empty()) throw DataError("reference " + r.ref_id + " has no journal");
    if (r.subject.empty()) throw DataError("reference " + r.ref_id + " has no subject");
    if (!ref_lookup_.emplace(r.ref_id, static_cast<RefIndex>(i)).second) {
      throw DataError("duplicate reference id " + r.ref_id);
    }
  }

  pub_lookup_.reserve(publications_.size());
  std::vector<std::uint32_t> seen(references_.size(), 0);
  std::uint32_t stamp = 0;
  for (std::size_t i = 0; i < publications_.size(); ++i) {
    const auto& p = publications_[i];
    if (p.pub_id.empty()) throw DataError("publication with empty id");
    if (!pub_lookup_.emplace(p.pub_id, i).second) throw DataError("duplicate publication id " + p.pub_id);
    if (p.year != slice_year_) {
      throw DataError("publication " + p.pub_id + " has year " + std::to_string(p.year) +
                      ", corpus slice is " + std::to_string(slice_year_));
    }
    if (p.refs.size() < 2) throw DataError("publication " + p.pub_id + " cites fewer than two references");
    ++stamp;
    for (RefIndex r : p.refs) {
      if (r >= references_.size()) throw DataError("publication " + p.pub_id + " cites an unknown reference");
      if (seen[r] == stamp) {
        throw DataError("publication " + p.pub_id + " cites " + references_[r].ref_id + " twice");
      }
      seen[r] = stamp;
    }
  }
}

std::optional<RefIndex> Corpus::find_reference(std::string_view ref_id) const {
  const auto it = ref_lookup_.find(std::string(ref_id));
  if (it == ref_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Corpus::find_publication(std::string_view pub_id) const {
  const auto it = pub_lookup_.find(std::string(pub_id));
  if (it == pub_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::citation_count() const {
  std::size_t n = 0;
  for (const auto& p : publications_) n += p.refs.size();
  return n;
}

bool Corpus::operator==(const Corpus& other) const {
  return slice_year_ == other.slice_year_ && background_ == other.background_ &&
         references_ == other.references_ && publications_ == other.publications_;
}

CorpusFiles CorpusFiles::in(const std::filesystem::path& dir) {
  return {dir / "publications.tsv", dir / "references.tsv", dir / "citations.tsv"};
}

std::size_t IngestDiagnostics::count(std::string_view reason) const {
  const auto it = dropped.find(reason);
  return it == dropped.end() ? 0 : it->second;
}

std::size_t IngestDiagnostics::total_dropped() const {
  std::size_t n = 0;
  for (const auto& [_, c] : dropped) n += c;
  return n;
}

namespace {

constexpr std::array<std::string_view, 4> kPubColumns{"pub_id", "year", "journal_id", "citations_8yr"};
constexpr std::array<std::string_view, 4> kRefColumns{"ref_id", "year", "journal_id", "subject"};
constexpr std::array<std::string_view, 2> kCiteColumns{"pub_id", "ref_id"};
constexpr std::array<std::string_view, 2> kJournalColumns{"raw_id", "journal_key"};

struct RawPub {
  std::string pub_id;
  int year;
  std::string journal;
  std::uint64_t citations;
};

struct RawRef {
  std::string ref_id;
  int year;
  std::string journal;
  std::string subject;
};

// Maps raw journal identifiers onto canonical ids: within each journal key the
// raw id seen on the most rows wins (ties: lexicographically smallest).
class JournalCanonicalizer {
public:
  explicit JournalCanonicalizer(const std::unordered_map<std::string, std::string>& aliases)
      : aliases_(aliases) {}

  void observe(const std::string& raw) {
    if (const auto key = key_of(raw)) ++counts_[*key][raw];
  }

  void finalize(std::size_t& merged) {
    for (const auto& [key, raw_counts] : counts_) {
      const std::string* best = nullptr;
      std::size_t best_n = 0;
      for (const auto& [raw, n] : raw_counts) {  // std::map: ascending raw id
        if (n > best_n) {
          best = &raw;
          best_n = n;
        }
      }
      for (const auto& [raw, n] : raw_counts) {
        canonical_[raw] = *best;
        if (raw != *best) ++merged;
      }
    }
  }

  // nullopt when the raw id is unresolvable.
  std::optional<std::string> canonical(const std::string& raw) const {
    const auto it = canonical_.find(raw);
    if (it == canonical_.end()) return std::nullopt;
    return it->second;
  }

private:
  std::optional<std::string> key_of(const std::string& raw) const {
    if (raw.empty()) return std::nullopt;
    if (aliases_.empty()) return raw;
    const auto it = aliases_.find(raw);
    if (it == aliases_.end()) return std::nullopt;
    return it->second;
  }

  const std::unordered_map<std::string, std::string>& aliases_;
  std::map<std::string, std::map<std::string, std::size_t>> counts_;
  std::unordered_map<std::string, std::string> canonical_;
};

}  // namespace

std::unordered_map<std::string, std::string> read_journal_aliases(const std::filesystem::path& file) {
  std::unordered_map<std::string, std::string> out;
  tsv::read(file, kJournalColumns, [&](std::span<const std::string_view> f, std::size_t line) {
    const auto raw = std::string(tsv::trim(f[0]));
    const auto key = std::string(tsv::trim(f[1]));
    if (raw.empty() || key.empty()) throw DataError::at(file.string(), line, "empty journal id");
    if (!out.emplace(raw, key).second) {
      throw DataError::at(file.string(), line, "raw journal id '" + raw + "' listed twice");
    }
  });
  return out;
}

IngestResult ingest(const CorpusFiles& files, const IngestConfig& config) {
  IngestDiagnostics diag;
  const auto drop = [&](std::string_view reason) { ++diag.dropped[std::string(reason)]; };

  std::vector<RawPub> raw_pubs;
  std::unordered_set<std::string> pub_ids;
  tsv::read(files.publications, kPubColumns, [&](std::span<const std::string_view> f, std::size_t line) {
    RawPub p{std::string(tsv::trim(f[0])), tsv::parse_int(f[1], files.publications, line, "year"),
             std::string(tsv::trim(f[2])),
             tsv::parse_count(f[3], files.publications, line, "citations_8yr")};
    if (p.pub_id.empty()) throw DataError::at(files.publications.string(), line, "empty pub_id");
    if (!pub_ids.insert(p.pub_id).second) {
      throw DataError::at(files.publications.string(), line, "duplicate pub_id '" + p.pub_id + "'");
    }
    raw_pubs.push_back(std::move(p));
  });

  std::vector<RawRef> raw_refs;
  std::unordered_set<std::string> ref_ids;
  tsv::read(files.references, kRefColumns, [&](std::span<const std::string_view> f, std::size_t line) {
    RawRef r{std::string(tsv::trim(f[0])), tsv::parse_int(f[1], files.references, line, "year"),
             std::string(tsv::trim(f[2])), std::string(tsv::trim(f[3]))};
    if (r.ref_id.empty()) throw DataError::at(files.references.string(), line, "empty ref_id");
    if (!ref_ids.insert(r.ref_id).second) {
      throw DataError::at(files.references.string(), line, "duplicate ref_id '" + r.ref_id + "'");
    }
    raw_refs.push_back(std::move(r));
  });

  JournalCanonicalizer journals(config.journal_aliases);
  for (const auto& p : raw_pubs) journals.observe(p.journal);
  for (const auto& r : raw_refs) journals.observe(r.journal);
  journals.finalize(diag.journals_merged);

  std::vector<ReferenceRecord> references;
  std::unordered_map<std::string, RefIndex> ref_index;
  for (auto& r : raw_refs) {
    auto journal = journals.canonical(r.journal);
    if (!journal) {
      drop(drop_reason::ref_journal);
      continue;
    }
    if (r.subject.empty()) {
      drop(drop_reason::ref_subject);
      continue;
    }
    if (r.year < config.min_ref_year || r.year > config.max_ref_year) {
      drop(drop_reason::ref_year);
      continue;
    }
    ref_index.emplace(r.ref_id, static_cast<RefIndex>(references.size()));
    references.push_back({std::move(r.ref_id), r.year, std::move(*journal), std::move(r.subject)});
  }

  int slice_year = 0;
  if (config.slice_year) {
    slice_year = *config.slice_year;
  } else if (!raw_pubs.empty()) {
    slice_year = raw_pubs.front().year;
    for (const auto& p : raw_pubs) {
      if (p.year != slice_year) {
        throw DataError(files.publications.string() +
                        ": publications span several years; set a slice year");
      }
    }
  }

  std::vector<Publication> pubs;
  std::unordered_map<std::string, std::size_t> pub_index;
  for (auto& p : raw_pubs) {
    auto journal = journals.canonical(p.journal);
    if (!journal) {
      drop(drop_reason::pub_journal);
      continue;
    }
    if (p.year != slice_year) {
      drop(drop_reason::pub_year);
      continue;
    }
    pub_index.emplace(p.pub_id, pubs.size());
    pubs.push_back({std::move(p.pub_id), p.year, std::move(*journal), {}, p.citations});
  }

  std::vector<std::unordered_set<RefIndex>> cited(pubs.size());
  tsv::read(files.citations, kCiteColumns, [&](std::span<const std::string_view> f, std::size_t) {
    const std::string pub_id(tsv::trim(f[0]));
    const std::string ref_id(tsv::trim(f[1]));
    const auto pit = pub_index.find(pub_id);
    if (pit == pub_index.end()) {
      // Citations of publications dropped above are not counted again.
      if (!pub_ids.contains(pub_id)) drop(drop_reason::cite_unknown_pub);
      return;
    }
    const auto rit = ref_index.find(ref_id);
    if (rit == ref_index.end()) {
      drop(drop_reason::cite_unknown_ref);
      return;
    }
    if (!cited[pit->second].insert(rit->second).second) {
      drop(drop_reason::cite_duplicate);
      return;
    }
    pubs[pit->second].refs.push_back(rit->second);
  });

  std::erase_if(pubs, [&](const Publication& p) {
    if (p.refs.size() >= 2) return false;
    drop(drop_reason::pub_few_refs);
    return true;
  });

  return {Corpus(slice_year, config.background, std::move(references), std::move(pubs)), std::move(diag)};
}

void export_tsv(const Corpus& corpus, const CorpusFiles& files) {
  const auto open = [](const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    return out;
  };

  auto pubs = open(files.publications);
  pubs << "pub_id\tyear\tjournal_id\tcitations_8yr\n";
  for (const auto& p : corpus.publications()) {
    pubs << p.pub_id << '\t' << p.year << '\t' << p.journal_id << '\t' << p.citations_8yr << '\n';
  }

  auto refs = open(files.references);
  refs << "ref_id\tyear\tjournal_id\tsubject\n";
  for (const auto& r : corpus.references()) {
    refs << r.ref_id << '\t' << r.year << '\t' << r.journal_id << '\t' << r.subject << '\n';
  }

  auto cites = open(files.citations);
  cites << "pub_id\tref_id\n";
  for (const auto& p : corpus.publications()) {
    for (RefIndex r : p.refs) cites << p.pub_id << '\t' << corpus.reference(r).ref_id << '\n';
  }
}

CorpusSummary summarize(const Corpus& corpus) {
  CorpusSummary s;
  s.unique_publications = corpus.publications().size();
  std::vector<bool> seen(corpus.references().size(), false);
  for (const auto& p : corpus.publications()) {
    s.total_references += p.refs.size();
    for (RefIndex r : p.refs) {
      if (!seen[r]) {
        seen[r] = true;
        ++s.unique_references;
      }
    }
  }
  s.ratio = s.unique_references == 0
                ? 0.0
                : static_cast<double>(s.total_references) / static_cast<double>(s.unique_references);
  return s;
}

}  // namespace cocite
