#include "cocite/classify.hpp"

#include "cocite/error.hpp"
#include "cocite/format.hpp"

#include <algorithm>
#include <cmath>

namespace cocite {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::LNLC: return "LNLC";
    case Category::LNHC: return "LNHC";
    case Category::HNLC: return "HNLC";
    case Category::HNHC: return "HNHC";
  }
  return "?";
}

void ClassifyConfig::validate() const {
  if (novelty_percentile != 10 && novelty_percentile != 1) {
    throw ConfigError("novelty percentile must be 10 or 1, got " + std::to_string(novelty_percentile));
  }
}

double percentile(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

PairStatsIndex::PairStatsIndex(const std::vector<PairStats>& stats) {
  std::vector<std::string> ids;
  ids.reserve(stats.size() * 2);
  for (const auto& s : stats) {
    ids.push_back(s.pair.a());
    ids.push_back(s.pair.b());
  }
  dict_ = JournalDictionary(std::move(ids));
  z_.reserve(stats.size());
  for (const auto& s : stats) {
    if (s.z) z_.emplace(pair_key(dict_.index(s.pair.a()), dict_.index(s.pair.b())), *s.z);
  }
}

std::optional<double> PairStatsIndex::z(PairKey key) const {
  const auto it = z_.find(key);
  if (it == z_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> PairStatsIndex::z(std::string_view journal_a, std::string_view journal_b) const {
  const auto a = dict_.find(journal_a);
  const auto b = dict_.find(journal_b);
  if (!a || !b) return std::nullopt;
  return z(pair_key(*a, *b));
}

std::optional<PubSummary> pub_zstats(const Publication& pub, const Corpus& corpus, const PairStatsIndex& index) {
  std::vector<std::optional<std::uint32_t>> journals;
  journals.reserve(pub.refs.size());
  for (RefIndex r : pub.refs) journals.push_back(index.journals().find(corpus.reference(r).journal_id));

  std::vector<double> zs;
  zs.reserve(journals.size() * journals.size() / 2);
  for (std::size_t i = 0; i < journals.size(); ++i) {
    if (!journals[i]) continue;
    for (std::size_t j = i + 1; j < journals.size(); ++j) {
      if (!journals[j]) continue;
      if (const auto z = index.z(pair_key(*journals[i], *journals[j]))) zs.push_back(*z);
    }
  }
  if (zs.empty()) return std::nullopt;

  std::sort(zs.begin(), zs.end());
  PubSummary s;
  s.pub_id = pub.pub_id;
  s.z_median = percentile(zs, 50.0);
  s.z_p10 = percentile(zs, 10.0);
  s.z_p1 = percentile(zs, 1.0);
  s.n_defined_pairs = zs.size();
  return s;
}

ZStatsResult corpus_zstats(const Corpus& corpus, const PairStatsIndex& index) {
  ZStatsResult out;
  out.summaries.reserve(corpus.publications().size());
  for (const auto& pub : corpus.publications()) {
    if (auto s = pub_zstats(pub, corpus, index)) {
      out.summaries.push_back(std::move(*s));
    } else {
      ++out.excluded;
    }
  }
  return out;
}

Classification classify_corpus(std::vector<PubSummary> summaries, const ClassifyConfig& cfg) {
  cfg.validate();
  Classification out;
  if (summaries.empty()) return out;

  std::vector<double> medians;
  medians.reserve(summaries.size());
  for (const auto& s : summaries) medians.push_back(s.z_median);
  std::sort(medians.begin(), medians.end());
  out.threshold = percentile(medians, 50.0);

  for (auto& s : summaries) {
    const bool hc = s.z_median > out.threshold;
    const double tail = cfg.novelty_percentile == 10 ? s.z_p10 : s.z_p1;
    const bool hn = tail < 0.0;
    s.category = hn ? (hc ? Category::HNHC : Category::HNLC) : (hc ? Category::LNHC : Category::LNLC);
  }
  out.summaries = std::move(summaries);
  return out;
}

void write_classification_csv(std::ostream& os, const std::vector<PubSummary>& summaries) {
  os << "pub_id,z_median,z_p10,z_p1,category,n_defined_pairs\n";
  for (const auto& s : summaries) {
    os << s.pub_id << ',' << format_double(s.z_median) << ',' << format_double(s.z_p10) << ','
       << format_double(s.z_p1) << ',' << (s.category ? to_string(*s.category) : "NA") << ','
       << s.n_defined_pairs << '\n';
  }
}

}  // namespace cocite
