#pragma once

// Citation-switching null models.
//
// Both algorithms operate on permutation groups: the citation slots whose
// cited reference shares a publication year. Moving tokens only within a group
// keeps every publication's reference count and reference-year histogram.
//
//  repcs  Each group's tokens (a multiset: a reference cited k times appears k
//         times) are dealt to its slots by one Fisher-Yates permutation. A slot
//         may receive its original reference. Publications that end up citing a
//         reference twice are deleted from the simulated corpus afterwards.
//
//  umsj   Sequential pairwise switching over an edge-set view of the network.
//         Each slot proposes a swap with a uniformly chosen other slot of its
//         group; proposals that would restore an original reference or put a
//         duplicate into either publication are rejected and redrawn, up to
//         max_retries times.

#include "cocite/corpus.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace cocite {

struct Slot {
  std::uint32_t pub = 0;       // index into ShuffleFrame::publications
  std::uint32_t position = 0;  // index into that publication's refs

  bool operator==(const Slot&) const = default;
};

struct PermutationGroup {
  int year = 0;
  std::vector<Slot> slots;       // analyzed-corpus slots first, in publication then citation order
  std::vector<RefIndex> tokens;  // tokens[i] is the reference originally at slots[i]
  std::size_t n_local = 0;       // slots [0, n_local) belong to the analyzed corpus
};

// Permutation groups together with the tables their indices refer to.
struct ShuffleFrame {
  Background background = Background::local;
  int slice_year = 0;
  // The analyzed corpus's reference table (same order), then pool-only references.
  std::vector<ReferenceRecord> references;
  // The analyzed corpus's publications, then pool-only publications.
  std::vector<Publication> publications;
  std::size_t n_local_pubs = 0;
  std::vector<PermutationGroup> groups;  // ascending year

  std::size_t local_citations() const;
};

// Local background: groups hold exactly the corpus's own citations.
ShuffleFrame build_groups(const Corpus& corpus);

// Global background: groups hold the citations of corpus and pool together
// (pool publications sharing a pub_id with the corpus are the same
// publication). Only analyzed-corpus slots are read back after shuffling.
// Throws DataError when the pool has no citations for a reference year the
// corpus cites, or the slice years differ.
ShuffleFrame build_groups(const Corpus& corpus, const Corpus& pool);

struct ShuffleStats {
  std::size_t deleted = 0;
  std::size_t fixed_points = 0;     // analyzed slots holding their original reference
  std::size_t retry_exhausted = 0;  // umsj slots left as-is
};

// Reusable per-thread state for repeated shuffles of one frame. After a run,
// refs()/deleted() describe the analyzed corpus's publications.
class ShuffleWorkspace {
public:
  explicit ShuffleWorkspace(const ShuffleFrame& frame);

  ShuffleStats run_repcs(std::uint64_t seed, std::uint32_t sim_index);
  ShuffleStats run_umsj(std::uint64_t seed, std::uint32_t sim_index, unsigned max_retries);

  std::size_t n_local_pubs() const { return frame_.n_local_pubs; }
  std::span<const RefIndex> refs(std::size_t local_pub) const {
    return {assigned_.data() + offset_[local_pub], offset_[local_pub + 1] - offset_[local_pub]};
  }
  bool deleted(std::size_t local_pub) const { return deleted_[local_pub] != 0; }

private:
  std::size_t error_correct();
  void prepare_umsj();

  const ShuffleFrame& frame_;
  std::vector<std::size_t> offset_;                     // local pub -> first flat slot
  std::vector<RefIndex> assigned_;                      // flat analyzed-corpus slots
  std::vector<std::vector<std::uint32_t>> flat_slot_;   // group -> local slot -> flat index
  std::vector<std::vector<RefIndex>> work_;             // group token buffers
  std::vector<std::uint32_t> swaps_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<char> deleted_;

  std::vector<std::vector<RefIndex>> current_;          // umsj: group -> slot -> token
  std::vector<std::unordered_set<RefIndex>> members_;   // umsj: publication -> cited refs
};

struct ShuffleOutcome {
  Corpus corpus;                     // surviving publications
  std::vector<Publication> deleted;  // removed by error correction, as shuffled
  std::size_t fixed_points = 0;
  std::size_t retry_exhausted = 0;

  std::vector<std::string> deleted_ids() const;
};

// sim_index selects the RNG streams, so (seed, sim_index) reproduces simulation
// number sim_index of a run_simulations call with the same master seed.
ShuffleOutcome repcs_shuffle(const ShuffleFrame& frame, std::uint64_t seed, std::uint32_t sim_index = 0);
ShuffleOutcome umsj_shuffle(const ShuffleFrame& frame, std::uint64_t seed, unsigned max_retries = 10,
                            std::uint32_t sim_index = 0);

struct PreservationReport {
  std::size_t publications_before = 0;
  std::size_t publications_after = 0;
  std::size_t publication_delta = 0;  // before - after
  std::size_t deleted = 0;
  std::vector<long> ref_count_deltas;             // per surviving publication
  std::vector<std::size_t> year_histogram_delta;  // per surviving publication, L1 distance
  std::size_t unmatched = 0;                      // survivors absent from `before`

  bool preserved() const;
};

PreservationReport preservation_report(const Corpus& before, const ShuffleOutcome& after);

}  // namespace cocite
