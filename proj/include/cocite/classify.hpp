#pragma once

// Per-publication z-score positional statistics and the novelty/conventionality
// 2x2 categories.

#include "cocite/corpus.hpp"
#include "cocite/pairs.hpp"
#include "cocite/simulate.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cocite {

enum class Category { LNLC = 0, LNHC = 1, HNLC = 2, HNHC = 3 };
inline constexpr std::array<Category, 4> kCategories{Category::LNLC, Category::LNHC, Category::HNLC,
                                                     Category::HNHC};

std::string_view to_string(Category c);
inline bool is_high_novelty(Category c) { return c == Category::HNLC || c == Category::HNHC; }
inline bool is_high_conventionality(Category c) { return c == Category::LNHC || c == Category::HNHC; }

struct PubSummary {
  std::string pub_id;
  double z_median = 0.0;
  double z_p10 = 0.0;
  double z_p1 = 0.0;
  std::size_t n_defined_pairs = 0;
  std::optional<Category> category;
};

struct ClassifyConfig {
  int novelty_percentile = 10;  // 10 or 1

  void validate() const;
};

// Linear interpolation between closest order statistics ("type 7").
// `sorted` must be ascending and non-empty; p in [0, 100].
double percentile(std::span<const double> sorted, double p);

// Journal-pair z lookup keyed by journal ids.
class PairStatsIndex {
public:
  explicit PairStatsIndex(const std::vector<PairStats>& stats);

  // nullopt when the pair is unknown or its z is undefined.
  std::optional<double> z(std::string_view journal_a, std::string_view journal_b) const;

  const JournalDictionary& journals() const { return dict_; }
  std::optional<double> z(PairKey key) const;

private:
  JournalDictionary dict_;
  std::unordered_map<PairKey, double> z_;
};

// Statistics over the z-scores of a publication's reference pairs, each pair
// instance counted with multiplicity. Pairs without a defined z are skipped;
// nullopt when none remain.
std::optional<PubSummary> pub_zstats(const Publication& pub, const Corpus& corpus, const PairStatsIndex& index);

struct ZStatsResult {
  std::vector<PubSummary> summaries;
  std::size_t excluded = 0;  // publications with no defined pair
};

ZStatsResult corpus_zstats(const Corpus& corpus, const PairStatsIndex& index);

struct Classification {
  std::vector<PubSummary> summaries;  // categories set
  double threshold = 0.0;             // median of per-publication medians
};

// HC iff z_median > threshold; HN iff the configured percentile < 0. Both strict.
Classification classify_corpus(std::vector<PubSummary> summaries, const ClassifyConfig& cfg);

// pub_id,z_median,z_p10,z_p1,category,n_defined_pairs
void write_classification_csv(std::ostream& os, const std::vector<PubSummary>& summaries);

}  // namespace cocite
