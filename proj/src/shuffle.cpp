#include "cocite/shuffle.hpp"

#include "cocite/error.hpp"
#include "cocite/rng.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace cocite {

std::size_t ShuffleFrame::local_citations() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < n_local_pubs; ++i) n += publications[i].refs.size();
  return n;
}

namespace {

// Lays out slots by year: local publications first, then the rest.
void fill_groups(ShuffleFrame& frame) {
  std::map<int, PermutationGroup> by_year;
  for (std::size_t p = 0; p < frame.publications.size(); ++p) {
    const auto& pub = frame.publications[p];
    const bool local = p < frame.n_local_pubs;
    for (std::size_t pos = 0; pos < pub.refs.size(); ++pos) {
      const RefIndex ref = pub.refs[pos];
      auto& g = by_year[frame.references[ref].year];
      g.slots.push_back({static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(pos)});
      g.tokens.push_back(ref);
      if (local) ++g.n_local;
    }
  }
  frame.groups.clear();
  frame.groups.reserve(by_year.size());
  for (auto& [year, g] : by_year) {
    g.year = year;
    frame.groups.push_back(std::move(g));
  }
}

}  // namespace

ShuffleFrame build_groups(const Corpus& corpus) {
  ShuffleFrame frame;
  frame.background = Background::local;
  frame.slice_year = corpus.slice_year();
  frame.references.assign(corpus.references().begin(), corpus.references().end());
  frame.publications.assign(corpus.publications().begin(), corpus.publications().end());
  frame.n_local_pubs = frame.publications.size();
  fill_groups(frame);
  return frame;
}

ShuffleFrame build_groups(const Corpus& corpus, const Corpus& pool) {
  if (pool.slice_year() != corpus.slice_year()) {
    throw DataError("pool slice year " + std::to_string(pool.slice_year()) + " differs from corpus slice year " +
                    std::to_string(corpus.slice_year()));
  }

  ShuffleFrame frame;
  frame.background = Background::global;
  frame.slice_year = corpus.slice_year();
  frame.references.assign(corpus.references().begin(), corpus.references().end());
  frame.publications.assign(corpus.publications().begin(), corpus.publications().end());
  frame.n_local_pubs = frame.publications.size();

  std::unordered_map<std::string_view, RefIndex> merged;
  merged.reserve(corpus.references().size() + pool.references().size());
  for (std::size_t i = 0; i < corpus.references().size(); ++i) {
    merged.emplace(corpus.references()[i].ref_id, static_cast<RefIndex>(i));
  }
  std::vector<RefIndex> pool_to_frame(pool.references().size());
  for (std::size_t i = 0; i < pool.references().size(); ++i) {
    const auto& r = pool.references()[i];
    const auto it = merged.find(r.ref_id);
    if (it != merged.end()) {
      pool_to_frame[i] = it->second;
    } else {
      pool_to_frame[i] = static_cast<RefIndex>(frame.references.size());
      frame.references.push_back(r);
    }
  }

  std::set<int> pool_years;
  for (const auto& p : pool.publications()) {
    for (RefIndex r : p.refs) pool_years.insert(pool.reference(r).year);
    if (corpus.find_publication(p.pub_id)) continue;
    Publication copy = p;
    for (auto& r : copy.refs) r = pool_to_frame[r];
    frame.publications.push_back(std::move(copy));
  }

  for (const auto& p : corpus.publications()) {
    for (RefIndex r : p.refs) {
      const auto& ref = corpus.reference(r);
      if (!pool_years.contains(ref.year)) {
        throw DataError("reference " + ref.ref_id + " (year " + std::to_string(ref.year) +
                        ") has no permutation group in the background pool");
      }
    }
  }

  fill_groups(frame);
  return frame;
}

ShuffleWorkspace::ShuffleWorkspace(const ShuffleFrame& frame) : frame_(frame) {
  offset_.assign(frame.n_local_pubs + 1, 0);
  for (std::size_t p = 0; p < frame.n_local_pubs; ++p) {
    offset_[p + 1] = offset_[p] + frame.publications[p].refs.size();
  }
  assigned_.resize(offset_.back());
  deleted_.assign(frame.n_local_pubs, 0);
  mark_.assign(frame.references.size(), 0);

  std::size_t largest = 0;
  flat_slot_.resize(frame.groups.size());
  work_.resize(frame.groups.size());
  for (std::size_t g = 0; g < frame.groups.size(); ++g) {
    const auto& group = frame.groups[g];
    auto& flat = flat_slot_[g];
    flat.resize(group.n_local);
    for (std::size_t i = 0; i < group.n_local; ++i) {
      flat[i] = static_cast<std::uint32_t>(offset_[group.slots[i].pub] + group.slots[i].position);
    }
    work_[g] = group.tokens;
    largest = std::max(largest, group.slots.size());
  }
  swaps_.resize(largest);
}

std::size_t ShuffleWorkspace::error_correct() {
  std::size_t removed = 0;
  for (std::size_t p = 0; p < frame_.n_local_pubs; ++p) {
    if (++stamp_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      stamp_ = 1;
    }
    bool dup = false;
    for (std::size_t s = offset_[p]; s < offset_[p + 1]; ++s) {
      const RefIndex r = assigned_[s];
      if (mark_[r] == stamp_) {
        dup = true;
        break;
      }
      mark_[r] = stamp_;
    }
    deleted_[p] = dup ? 1 : 0;
    removed += dup ? 1 : 0;
  }
  return removed;
}

ShuffleStats ShuffleWorkspace::run_repcs(std::uint64_t seed, std::uint32_t sim_index) {
  ShuffleStats stats;
  for (std::size_t g = 0; g < frame_.groups.size(); ++g) {
    const auto& group = frame_.groups[g];
    auto& w = work_[g];
    const std::size_t n = w.size();
    // Forward Fisher-Yates; only the first n_local positions are read back, so
    // the remaining steps (which would not change them) are skipped.
    const std::size_t steps = std::min(group.n_local, n - 1);
    StreamRng rng(seed, sim_index, static_cast<std::uint32_t>(g));
    for (std::size_t i = 0; i < steps; ++i) {
      const auto j = static_cast<std::uint32_t>(i + rng.below(n - i));
      std::swap(w[i], w[j]);
      swaps_[i] = j;
    }
    const auto& flat = flat_slot_[g];
    for (std::size_t i = 0; i < group.n_local; ++i) {
      assigned_[flat[i]] = w[i];
      stats.fixed_points += w[i] == group.tokens[i] ? 1 : 0;
    }
    for (std::size_t i = steps; i-- > 0;) std::swap(w[i], w[swaps_[i]]);
  }
  stats.deleted = error_correct();
  return stats;
}

void ShuffleWorkspace::prepare_umsj() {
  if (current_.empty()) {
    current_.resize(frame_.groups.size());
    members_.resize(frame_.publications.size());
  }
  for (std::size_t g = 0; g < frame_.groups.size(); ++g) current_[g] = frame_.groups[g].tokens;
  for (std::size_t p = 0; p < frame_.publications.size(); ++p) {
    auto& m = members_[p];
    m.clear();
    m.insert(frame_.publications[p].refs.begin(), frame_.publications[p].refs.end());
  }
}

ShuffleStats ShuffleWorkspace::run_umsj(std::uint64_t seed, std::uint32_t sim_index, unsigned max_retries) {
  prepare_umsj();
  ShuffleStats stats;
  for (std::size_t g = 0; g < frame_.groups.size(); ++g) {
    const auto& group = frame_.groups[g];
    const auto& original = group.tokens;
    auto& cur = current_[g];
    const std::size_t n = cur.size();
    StreamRng rng(seed, sim_index, static_cast<std::uint32_t>(g));

    for (std::size_t i = 0; i < n; ++i) {
      bool switched = false;
      for (unsigned attempt = 0; n > 1 && attempt <= max_retries && !switched; ++attempt) {
        std::size_t j = rng.below(n - 1);
        if (j >= i) ++j;
        const std::uint32_t pi = group.slots[i].pub;
        const std::uint32_t pj = group.slots[j].pub;
        const RefIndex ti = cur[i];
        const RefIndex tj = cur[j];
        if (pi == pj) continue;
        if (tj == original[i] || ti == original[j]) continue;
        if (members_[pi].contains(tj) || members_[pj].contains(ti)) continue;

        members_[pi].erase(ti);
        members_[pi].insert(tj);
        members_[pj].erase(tj);
        members_[pj].insert(ti);
        cur[i] = tj;
        cur[j] = ti;
        switched = true;
      }
      if (!switched) ++stats.retry_exhausted;
    }

    const auto& flat = flat_slot_[g];
    for (std::size_t i = 0; i < group.n_local; ++i) {
      assigned_[flat[i]] = cur[i];
      stats.fixed_points += cur[i] == original[i] ? 1 : 0;
    }
  }
  stats.deleted = error_correct();
  return stats;
}

std::vector<std::string> ShuffleOutcome::deleted_ids() const {
  std::vector<std::string> ids;
  ids.reserve(deleted.size());
  for (const auto& p : deleted) ids.push_back(p.pub_id);
  return ids;
}

namespace {

ShuffleOutcome collect(const ShuffleFrame& frame, const ShuffleWorkspace& ws, const ShuffleStats& stats) {
  std::vector<Publication> survivors;
  std::vector<Publication> deleted;
  survivors.reserve(frame.n_local_pubs - stats.deleted);
  for (std::size_t p = 0; p < frame.n_local_pubs; ++p) {
    Publication pub = frame.publications[p];
    const auto refs = ws.refs(p);
    pub.refs.assign(refs.begin(), refs.end());
    (ws.deleted(p) ? deleted : survivors).push_back(std::move(pub));
  }
  ShuffleOutcome out;
  out.corpus = Corpus(frame.slice_year, frame.background, frame.references, std::move(survivors));
  out.deleted = std::move(deleted);
  out.fixed_points = stats.fixed_points;
  out.retry_exhausted = stats.retry_exhausted;
  return out;
}

}  // namespace

ShuffleOutcome repcs_shuffle(const ShuffleFrame& frame, std::uint64_t seed, std::uint32_t sim_index) {
  ShuffleWorkspace ws(frame);
  const auto stats = ws.run_repcs(seed, sim_index);
  return collect(frame, ws, stats);
}

ShuffleOutcome umsj_shuffle(const ShuffleFrame& frame, std::uint64_t seed, unsigned max_retries,
                            std::uint32_t sim_index) {
  ShuffleWorkspace ws(frame);
  const auto stats = ws.run_umsj(seed, sim_index, max_retries);
  return collect(frame, ws, stats);
}

bool PreservationReport::preserved() const {
  if (unmatched != 0 || publication_delta != deleted) return false;
  return std::all_of(ref_count_deltas.begin(), ref_count_deltas.end(), [](long d) { return d == 0; }) &&
         std::all_of(year_histogram_delta.begin(), year_histogram_delta.end(),
                     [](std::size_t d) { return d == 0; });
}

PreservationReport preservation_report(const Corpus& before, const ShuffleOutcome& after) {
  PreservationReport rep;
  rep.publications_before = before.publications().size();
  rep.publications_after = after.corpus.publications().size();
  rep.publication_delta = rep.publications_before - rep.publications_after;
  rep.deleted = after.deleted.size();

  std::map<int, long> hist;
  for (const auto& pub : after.corpus.publications()) {
    const auto idx = before.find_publication(pub.pub_id);
    if (!idx) {
      ++rep.unmatched;
      continue;
    }
    const auto& orig = before.publications()[*idx];
    rep.ref_count_deltas.push_back(static_cast<long>(pub.refs.size()) - static_cast<long>(orig.refs.size()));

    hist.clear();
    for (RefIndex r : orig.refs) ++hist[before.reference(r).year];
    for (RefIndex r : pub.refs) --hist[after.corpus.reference(r).year];
    std::size_t l1 = 0;
    for (const auto& [_, d] : hist) l1 += static_cast<std::size_t>(d < 0 ? -d : d);
    rep.year_histogram_delta.push_back(l1);
  }
  return rep;
}

}  // namespace cocite
