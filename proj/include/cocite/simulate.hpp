#pragma once

// Monte Carlo expected journal-pair frequencies and z-scores.

#include "cocite/corpus.hpp"
#include "cocite/pairs.hpp"
#include "cocite/shuffle.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

namespace cocite {

enum class Algorithm { repcs, umsj };
std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

enum class SigmaMode { population, sample };

struct SimConfig {
  std::size_t n_simulations = 1000;
  std::uint64_t master_seed = 0;
  Background background = Background::local;
  Algorithm algorithm = Algorithm::repcs;
  unsigned workers = 0;  // 0: hardware concurrency
  unsigned umsj_max_retries = 10;
  SigmaMode sigma = SigmaMode::population;

  void validate() const;  // throws ConfigError
};

struct PairMoments {
  double mean = 0.0;
  double sigma = 0.0;

  bool operator==(const PairMoments&) const = default;
};

using MomentTable = std::map<JournalPair, PairMoments>;

// Exact integer sums of one pair's per-simulation frequencies.
struct FrequencySums {
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
  void add(std::uint64_t f) {
    sum += f;
    sum_sq += f * f;
  }
};

// Mean and standard deviation over n simulations; simulations never added count as 0.
PairMoments moments_of(const FrequencySums& sums, std::size_t n, SigmaMode mode = SigmaMode::population);

struct SimulationDiagnostics {
  // Indexed by simulation.
  std::vector<std::size_t> deleted;
  std::vector<std::size_t> fixed_points;
  std::vector<std::size_t> retry_exhausted;
  std::vector<std::uint64_t> total_pairs;
  double shuffle_seconds = 0.0;  // summed over workers
  double count_seconds = 0.0;    // summed over workers
};

struct SimulationResult {
  std::size_t n_simulations = 0;
  MomentTable moments;  // every pair seen in at least one simulation
  SimulationDiagnostics diagnostics;
};

// Runs cfg.n_simulations shuffles of `corpus` (pool is used for the global
// background only) and returns per-pair mean and standard deviation, counting
// simulations in which a pair is absent as frequency 0. Simulation s draws
// from RNG streams (master_seed, s, group), and the per-pair sums are exact
// integers, so the result does not depend on the worker count.
SimulationResult run_simulations(const Corpus& corpus, const Corpus& pool, const SimConfig& cfg);
SimulationResult run_simulations(const ShuffleFrame& frame, const SimConfig& cfg);

// Shuffle-only timing of `n` simulations (no pair counting), in seconds.
double time_shuffles(const ShuffleFrame& frame, const SimConfig& cfg);

struct PairStats {
  JournalPair pair;
  std::uint64_t f_obs = 0;
  double f_exp = 0.0;
  double sigma = 0.0;
  std::optional<double> z;  // absent when sigma == 0

  bool defined() const { return z.has_value(); }
};

// One entry per pair in the union of observed and simulated supports, ordered by pair.
std::vector<PairStats> zscores(const JournalPairTable& observed, const MomentTable& simulated);

std::size_t count_undefined(const std::vector<PairStats>& stats);

struct SignChangeReport {
  std::size_t common_defined = 0;  // pairs with defined z in both inputs
  std::size_t changed = 0;         // strictly opposite signs
  double fraction = 0.0;
};

SignChangeReport sign_change_report(const std::vector<PairStats>& a, const std::vector<PairStats>& b);

// journal_a,journal_b,mean,sigma
void write_moments_csv(std::ostream& os, const MomentTable& moments);
// journal_a,journal_b,f_obs,f_exp,sigma,z,defined_flag
void write_pair_stats_csv(std::ostream& os, const std::vector<PairStats>& stats);

}  // namespace cocite
