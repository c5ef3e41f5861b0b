#pragma once

// Journal co-citation pairs and their frequency tables.

#include "cocite/corpus.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cocite {

// Canonical unordered journal pair: a <= b lexicographically. Self-pairs allowed.
class JournalPair {
public:
  JournalPair(std::string x, std::string y);

  const std::string& a() const { return a_; }
  const std::string& b() const { return b_; }
  bool is_self() const { return a_ == b_; }

  auto operator<=>(const JournalPair&) const = default;
  bool operator==(const JournalPair&) const = default;

private:
  std::string a_;
  std::string b_;
};

std::ostream& operator<<(std::ostream& os, const JournalPair& p);

class JournalPairTable {
public:
  using Map = std::map<JournalPair, std::uint64_t>;

  void add(const JournalPair& pair, std::uint64_t count = 1);

  std::uint64_t frequency(const JournalPair& pair) const;
  std::uint64_t total_pairs() const { return total_; }
  std::size_t size() const { return freq_.size(); }
  bool empty() const { return freq_.empty(); }

  Map::const_iterator begin() const { return freq_.begin(); }
  Map::const_iterator end() const { return freq_.end(); }

  bool operator==(const JournalPairTable&) const = default;

private:
  Map freq_;
  std::uint64_t total_ = 0;
};

// All n(n-1)/2 journal pairs of a publication's references, in enumeration
// order (i < j). Throws DataError naming the ref when a reference index does
// not resolve or its journal is empty.
std::vector<JournalPair> pub_pairs(const Publication& pub, std::span<const ReferenceRecord> refs);

JournalPairTable observed_frequencies(const Corpus& corpus);

// journal_a,journal_b,frequency
void write_pair_table_csv(std::ostream& os, const JournalPairTable& table);

// --- indexed counting -------------------------------------------------------
//
// Hot loops work on dense journal indices. A JournalDictionary assigns indices
// in lexicographic order of the ids, so (index a <= index b) is the same
// canonical order JournalPair uses.

class JournalDictionary {
public:
  JournalDictionary() = default;
  explicit JournalDictionary(std::vector<std::string> ids);  // sorted + deduplicated here

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::uint32_t index) const { return ids_[index]; }
  // Throws std::out_of_range for unknown ids.
  std::uint32_t index(std::string_view id) const;
  std::optional<std::uint32_t> find(std::string_view id) const;

private:
  std::vector<std::string> ids_;
};

using PairKey = std::uint64_t;

inline PairKey pair_key(std::uint32_t x, std::uint32_t y) {
  return x <= y ? (static_cast<PairKey>(x) << 32) | y : (static_cast<PairKey>(y) << 32) | x;
}
inline std::uint32_t key_first(PairKey k) { return static_cast<std::uint32_t>(k >> 32); }
inline std::uint32_t key_second(PairKey k) { return static_cast<std::uint32_t>(k); }

// Adds the journal pairs of one publication to `sink(key, count)`.
// `journals` holds the journal index of each reference and is reordered in place.
// Pairs are grouped by journal, so repeated journals cost one call per distinct pair.
template <typename Sink>
void count_journal_pairs(std::span<std::uint32_t> journals, Sink&& sink);

JournalDictionary journals_of(const Corpus& corpus);

// Converts key counts back into a string-keyed table.
template <typename Range>
JournalPairTable to_pair_table(const Range& key_counts, const JournalDictionary& dict) {
  JournalPairTable table;
  for (const auto& [key, count] : key_counts) {
    if (count == 0) continue;
    table.add(JournalPair(dict.id(key_first(key)), dict.id(key_second(key))), count);
  }
  return table;
}

}  // namespace cocite

#include "cocite/pairs_impl.hpp"
