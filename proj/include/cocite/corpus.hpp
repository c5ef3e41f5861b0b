#pragma once

// Corpus data model: one year slice of citing publications, their cited
// references, and the journal/subject metadata of those references.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cocite {

// Which substitution pool a corpus represents (or was shuffled against).
enum class Background { local, global };

std::string_view to_string(Background b);
Background parse_background(std::string_view s);

using RefIndex = std::uint32_t;

struct ReferenceRecord {
  std::string ref_id;
  int year = 0;
  std::string journal_id;
  std::string subject;

  bool operator==(const ReferenceRecord&) const = default;
};

struct Publication {
  std::string pub_id;
  int year = 0;
  std::string journal_id;
  std::vector<RefIndex> refs;  // indices into the owning corpus's reference table, citation order
  std::uint64_t citations_8yr = 0;

  bool operator==(const Publication&) const = default;
};

// Immutable after construction. The constructor enforces:
//  - unique, non-empty ref ids and pub ids; non-empty journal ids and subjects;
//  - every publication has year == slice_year;
//  - every publication cites >= 2 distinct, resolvable references.
class Corpus {
public:
  Corpus() = default;
  Corpus(int slice_year, Background tag, std::vector<ReferenceRecord> references,
         std::vector<Publication> publications);

  int slice_year() const { return slice_year_; }
  Background background() const { return background_; }

  std::span<const Publication> publications() const { return publications_; }
  std::span<const ReferenceRecord> references() const { return references_; }
  const ReferenceRecord& reference(RefIndex i) const { return references_[i]; }

  std::optional<RefIndex> find_reference(std::string_view ref_id) const;
  std::optional<std::size_t> find_publication(std::string_view pub_id) const;

  // Total citation instances (sum of reference-list lengths).
  std::size_t citation_count() const;

  bool operator==(const Corpus& other) const;

private:
  int slice_year_ = 0;
  Background background_ = Background::local;
  std::vector<ReferenceRecord> references_;
  std::vector<Publication> publications_;
  std::unordered_map<std::string, RefIndex> ref_lookup_;
  std::unordered_map<std::string, std::size_t> pub_lookup_;
};

// --- ingestion --------------------------------------------------------------

struct CorpusFiles {
  std::filesystem::path publications;
  std::filesystem::path references;
  std::filesystem::path citations;

  // publications.tsv / references.tsv / citations.tsv inside `dir`.
  static CorpusFiles in(const std::filesystem::path& dir);
};

struct IngestConfig {
  // Publications outside this year are dropped. When unset, all publications
  // must share one year, which becomes the slice year.
  std::optional<int> slice_year;
  int min_ref_year = 1800;
  int max_ref_year = 2100;
  Background background = Background::local;
  // Raw journal identifier -> journal key. Raw ids sharing a key are one
  // journal; the most frequent raw id becomes its canonical id. When the map is
  // non-empty, raw ids absent from it are unresolvable.
  std::unordered_map<std::string, std::string> journal_aliases;
};

namespace drop_reason {
inline constexpr std::string_view ref_journal = "reference: unresolvable journal";
inline constexpr std::string_view ref_subject = "reference: missing subject";
inline constexpr std::string_view ref_year = "reference: year out of range";
inline constexpr std::string_view pub_journal = "publication: unresolvable journal";
inline constexpr std::string_view pub_year = "publication: year outside slice";
inline constexpr std::string_view cite_unknown_pub = "citation: unknown publication";
inline constexpr std::string_view cite_unknown_ref = "citation: unresolvable reference";
inline constexpr std::string_view cite_duplicate = "citation: duplicate";
inline constexpr std::string_view pub_few_refs = "publication: fewer than two references";
}  // namespace drop_reason

struct IngestDiagnostics {
  std::map<std::string, std::size_t, std::less<>> dropped;  // reason -> rows
  std::size_t journals_merged = 0;  // raw ids folded into another canonical id

  std::size_t count(std::string_view reason) const;
  std::size_t total_dropped() const;
};

struct IngestResult {
  Corpus corpus;
  IngestDiagnostics diagnostics;
};

IngestResult ingest(const CorpusFiles& files, const IngestConfig& config);

// journals.tsv: raw_id, journal_key
std::unordered_map<std::string, std::string> read_journal_aliases(const std::filesystem::path& file);

// Writes the three TSV files. References are written in table order,
// citations in publication order then citation order.
void export_tsv(const Corpus& corpus, const CorpusFiles& files);

// --- summary ----------------------------------------------------------------

struct CorpusSummary {
  std::size_t unique_publications = 0;
  std::size_t unique_references = 0;  // distinct references cited
  std::size_t total_references = 0;   // citation instances
  double ratio = 0.0;                 // total / unique; 0 for an empty corpus

  bool operator==(const CorpusSummary&) const = default;
};

CorpusSummary summarize(const Corpus& corpus);

}  // namespace cocite
