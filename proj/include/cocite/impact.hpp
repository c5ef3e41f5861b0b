#pragma once

// Hit designation by citation percentile, hit rates per category and
// chi-square goodness-of-fit tests of the hit distribution.

#include "cocite/classify.hpp"
#include "cocite/corpus.hpp"

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace cocite {

struct HitConfig {
  int hit_percentile = 10;  // 1, 2, 5 or 10

  void validate() const;
};

// Publications whose 8-year citation count is >= the (100 - p)th percentile of
// the citation distribution (type-7 interpolation, evaluated exactly). Every
// publication tied at the cutoff is a hit. Throws DataError for an empty input.
std::unordered_set<std::string> designate_hits(std::span<const Publication> pubs, const HitConfig& cfg);

// Upper tail of the chi-square distribution: Q(df/2, x/2).
double chi_square_sf(double statistic, int df);

struct ChiSquareTest {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  bool valid = false;  // false when any expected cell is below 5
  std::vector<double> expected;
  std::vector<int> direction;  // sign(observed - expected) per cell
};

// Goodness of fit of `observed` hits against expected(c) = total_hits * size(c) / total_size.
ChiSquareTest chi_square_gof(std::span<const std::uint64_t> observed, std::span<const std::uint64_t> sizes);

struct CategoryHits {
  std::uint64_t n_articles = 0;
  std::uint64_t n_hits = 0;
  double hit_rate = 0.0;  // 0 for an empty category
};

struct HitReport {
  std::array<CategoryHits, 4> categories;  // indexed by Category
  std::uint64_t total_articles = 0;
  std::uint64_t total_hits = 0;
  ChiSquareTest chi2_4cat;             // LNLC, LNHC, HNLC, HNHC
  ChiSquareTest chi2_novelty;          // LN, HN
  ChiSquareTest chi2_conventionality;  // LC, HC

  const CategoryHits& operator[](Category c) const { return categories[static_cast<std::size_t>(c)]; }
};

// Summaries must carry categories; publications absent from `hits` are non-hits.
HitReport hit_report(std::span<const PubSummary> summaries, const std::unordered_set<std::string>& hits);

// category,n_articles,n_hits,hit_rate
void write_hit_report_csv(std::ostream& os, const HitReport& report);
// Test statistics as JSON.
void write_hit_tests_json(std::ostream& os, const HitReport& report, const HitConfig& cfg);
// 2x2 grid of hit rates: rows HN/LN, columns LC/HC.
void print_hit_grid(std::ostream& os, const HitReport& report);

}  // namespace cocite
