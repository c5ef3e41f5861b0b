#pragma once

// Model-misspecification diagnostics.

#include "cocite/corpus.hpp"
#include "cocite/pairs.hpp"
#include "cocite/shuffle.hpp"
#include "cocite/simulate.hpp"

#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace cocite {

enum class LogBase { bits, nats };

struct DivergenceResult {
  std::string corpus_tag;
  Background background = Background::local;
  double kld = 0.0;
  std::size_t n_support = 0;
  double epsilon = 0.0;
};

// D(P_obs || P_sim) over pairs whose journals are both in `journal_filter`.
// Both tables are taken on the union support, `epsilon` is added to every bin,
// and each is normalized to a distribution. Throws DataError when either
// filtered table is empty; ConfigError when epsilon <= 0.
DivergenceResult kl_divergence(const JournalPairTable& observed, const std::map<JournalPair, double>& sim_mean,
                               const std::set<std::string>& journal_filter, double epsilon = 1e-12,
                               LogBase base = LogBase::bits);

DivergenceResult kl_divergence(const JournalPairTable& observed, const MomentTable& simulated,
                               const std::set<std::string>& journal_filter, double epsilon = 1e-12,
                               LogBase base = LogBase::bits);

// Journals of the references a corpus cites.
std::set<std::string> cited_journals(const Corpus& corpus);

struct CompositionRow {
  std::string subject;
  std::uint64_t original = 0;
  std::uint64_t shuffled = 0;
  std::uint64_t fold = 1;
};

// Rounded max/min ratio; 1 when equal or both zero; a zero side counts as 1.
std::uint64_t fold_difference(std::uint64_t original, std::uint64_t shuffled);

enum class CompositionStage {
  before_correction,  // every shuffled publication, including those error correction deleted
  after_correction,   // surviving publications only
};

// Citation instances per subject before and after a shuffle. An empty
// `subjects` set means every subject seen on either side.
std::vector<CompositionRow> composition_fold(const Corpus& before, const ShuffleOutcome& after,
                                             const std::set<std::string>& subjects = {},
                                             CompositionStage stage = CompositionStage::after_correction);

// subject,o,s,fold
void write_composition_csv(std::ostream& os, const std::vector<CompositionRow>& rows);

}  // namespace cocite
