#include "cocite/pairs.hpp"

#include "cocite/error.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace cocite {

JournalPair::JournalPair(std::string x, std::string y) : a_(std::move(x)), b_(std::move(y)) {
  if (b_ < a_) std::swap(a_, b_);
}

std::ostream& operator<<(std::ostream& os, const JournalPair& p) {
  return os << '(' << p.a() << ", " << p.b() << ')';
}

void JournalPairTable::add(const JournalPair& pair, std::uint64_t count) {
  if (count == 0) return;
  freq_[pair] += count;
  total_ += count;
}

std::uint64_t JournalPairTable::frequency(const JournalPair& pair) const {
  const auto it = freq_.find(pair);
  return it == freq_.end() ? 0 : it->second;
}

std::vector<JournalPair> pub_pairs(const Publication& pub, std::span<const ReferenceRecord> refs) {
  std::vector<const std::string*> journals;
  journals.reserve(pub.refs.size());
  for (RefIndex r : pub.refs) {
    if (r >= refs.size()) {
      throw DataError("publication " + pub.pub_id + ": reference #" + std::to_string(r) + " does not resolve");
    }
    if (refs[r].journal_id.empty()) {
      throw DataError("publication " + pub.pub_id + ": reference " + refs[r].ref_id + " has no journal");
    }
    journals.push_back(&refs[r].journal_id);
  }

  std::vector<JournalPair> out;
  out.reserve(journals.size() * (journals.size() - (journals.empty() ? 0 : 1)) / 2);
  for (std::size_t i = 0; i < journals.size(); ++i) {
    for (std::size_t j = i + 1; j < journals.size(); ++j) out.emplace_back(*journals[i], *journals[j]);
  }
  return out;
}

JournalDictionary::JournalDictionary(std::vector<std::string> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

std::optional<std::uint32_t> JournalDictionary::find(std::string_view id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - ids_.begin());
}

std::uint32_t JournalDictionary::index(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw std::out_of_range("unknown journal '" + std::string(id) + "'");
}

JournalDictionary journals_of(const Corpus& corpus) {
  std::vector<std::string> ids;
  ids.reserve(corpus.references().size());
  for (const auto& r : corpus.references()) ids.push_back(r.journal_id);
  return JournalDictionary(std::move(ids));
}

JournalPairTable observed_frequencies(const Corpus& corpus) {
  const auto dict = journals_of(corpus);
  std::vector<std::uint32_t> ref_journal;
  ref_journal.reserve(corpus.references().size());
  for (const auto& r : corpus.references()) ref_journal.push_back(dict.index(r.journal_id));

  std::unordered_map<PairKey, std::uint64_t> counts;
  std::vector<std::uint32_t> buf;
  for (const auto& p : corpus.publications()) {
    buf.clear();
    for (RefIndex r : p.refs) buf.push_back(ref_journal[r]);
    count_journal_pairs(std::span(buf), [&](PairKey k, std::uint64_t c) { counts[k] += c; });
  }
  return to_pair_table(counts, dict);
}

void write_pair_table_csv(std::ostream& os, const JournalPairTable& table) {
  os << "journal_a,journal_b,frequency\n";
  for (const auto& [pair, f] : table) os << pair.a() << ',' << pair.b() << ',' << f << '\n';
}

}  // namespace cocite
