#pragma once

// Synthetic citation corpora with disciplinary structure.
//
// Each discipline owns a set of journals, a pool of citable references and a
// set of citing publications. A publication draws its reference count from a
// negative binomial shifted by the minimum, then for each citation picks its
// own discipline's pool with probability p_intra (otherwise a uniformly chosen
// other discipline) and a reference from that pool by Zipf popularity, without
// repeating a reference within the publication. Subject label = discipline.

#include "cocite/corpus.hpp"
#include "cocite/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cocite {

struct RefCountSpec {
  double mean = 12.0;
  double dispersion = 4.0;  // negative binomial shape; larger is closer to Poisson
  std::size_t min = 2;
  std::size_t max = 80;  // draws above are clipped
};

struct SynthConfig {
  int slice_year = 1995;
  int ref_year_span = 10;  // reference years slice_year - span + 1 .. slice_year
  std::size_t n_disciplines = 3;
  std::size_t journals_per_discipline = 20;
  std::vector<std::size_t> pubs_per_discipline{1000, 1000, 1000};
  std::vector<std::size_t> ref_pool_per_discipline{4000, 4000, 4000};
  RefCountSpec refs_per_pub;
  double p_intra = 0.85;
  double skew = 0.6;  // Zipf exponent of reference popularity
  double citation_log_mean = 1.5;  // citations_8yr = floor(lognormal)
  double citation_log_sigma = 1.2;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

struct SynthCorpus {
  Corpus full;                       // every discipline, global tag
  std::vector<Corpus> disciplines;   // one local corpus per discipline
  std::vector<std::string> labels;   // subject label of each discipline
};

SynthCorpus generate(const SynthConfig& cfg);

// Discrete Zipf sampler over ranks 0..n-1 with weight (rank + 1)^-exponent.
class ZipfSampler {
public:
  ZipfSampler(std::size_t n, double exponent);
  std::size_t operator()(StreamRng& rng) const;
  std::size_t size() const { return cdf_.size(); }

private:
  std::vector<double> cdf_;
};

std::string discipline_label(std::size_t d);

}  // namespace cocite
