#include "cocite/diverge.hpp"

#include "cocite/error.hpp"

#include <cmath>

namespace cocite {

DivergenceResult kl_divergence(const JournalPairTable& observed, const std::map<JournalPair, double>& sim_mean,
                               const std::set<std::string>& journal_filter, double epsilon, LogBase base) {
  if (!(epsilon > 0.0)) throw ConfigError("K-L smoothing epsilon must be positive");
  const auto keep = [&](const JournalPair& p) {
    return journal_filter.contains(p.a()) && journal_filter.contains(p.b());
  };

  // pair -> (observed mass, simulated mass) on the union support
  std::map<JournalPair, std::pair<double, double>> bins;
  for (const auto& [pair, f] : observed) {
    if (keep(pair)) bins[pair].first = static_cast<double>(f);
  }
  bool any_obs = false;
  for (const auto& [_, v] : bins) any_obs = any_obs || v.first > 0.0;
  bool any_sim = false;
  for (const auto& [pair, m] : sim_mean) {
    if (!keep(pair) || m <= 0.0) continue;
    bins[pair].second = m;
    any_sim = true;
  }
  if (!any_obs || !any_sim) throw DataError("K-L divergence: empty support after journal filtering");

  double total_p = 0.0, total_q = 0.0;
  for (const auto& [_, v] : bins) {
    total_p += v.first + epsilon;
    total_q += v.second + epsilon;
  }
  double d = 0.0;
  for (const auto& [_, v] : bins) {
    const double p = (v.first + epsilon) / total_p;
    const double q = (v.second + epsilon) / total_q;
    d += p * std::log(p / q);
  }
  if (base == LogBase::bits) d /= std::log(2.0);

  DivergenceResult r;
  r.kld = std::max(d, 0.0);
  r.n_support = bins.size();
  r.epsilon = epsilon;
  return r;
}

DivergenceResult kl_divergence(const JournalPairTable& observed, const MomentTable& simulated,
                               const std::set<std::string>& journal_filter, double epsilon, LogBase base) {
  std::map<JournalPair, double> means;
  for (const auto& [pair, m] : simulated) means.emplace_hint(means.end(), pair, m.mean);
  return kl_divergence(observed, means, journal_filter, epsilon, base);
}

std::set<std::string> cited_journals(const Corpus& corpus) {
  std::set<std::string> out;
  for (const auto& p : corpus.publications()) {
    for (RefIndex r : p.refs) out.insert(corpus.reference(r).journal_id);
  }
  return out;
}

std::uint64_t fold_difference(std::uint64_t original, std::uint64_t shuffled) {
  if (original == shuffled) return 1;
  const std::uint64_t hi = std::max(original, shuffled);
  const std::uint64_t lo = std::max<std::uint64_t>(std::min(original, shuffled), 1);
  // round half up in integers
  return (2 * hi + lo) / (2 * lo);
}

std::vector<CompositionRow> composition_fold(const Corpus& before, const ShuffleOutcome& after,
                                             const std::set<std::string>& subjects, CompositionStage stage) {
  std::map<std::string, CompositionRow> rows;
  for (const auto& s : subjects) rows[s].subject = s;
  const auto row = [&](const std::string& subject) -> CompositionRow* {
    if (!subjects.empty() && !subjects.contains(subject)) return nullptr;
    auto& r = rows[subject];
    r.subject = subject;
    return &r;
  };

  for (const auto& p : before.publications()) {
    for (RefIndex r : p.refs) {
      if (auto* row_ptr = row(before.reference(r).subject)) ++row_ptr->original;
    }
  }
  const auto& table = after.corpus;
  const auto tally = [&](const Publication& p) {
    for (RefIndex r : p.refs) {
      if (auto* row_ptr = row(table.reference(r).subject)) ++row_ptr->shuffled;
    }
  };
  for (const auto& p : table.publications()) tally(p);
  if (stage == CompositionStage::before_correction) {
    for (const auto& p : after.deleted) tally(p);
  }

  std::vector<CompositionRow> out;
  out.reserve(rows.size());
  for (auto& [_, r] : rows) {
    r.fold = fold_difference(r.original, r.shuffled);
    out.push_back(std::move(r));
  }
  return out;
}

void write_composition_csv(std::ostream& os, const std::vector<CompositionRow>& rows) {
  os << "subject,o,s,fold\n";
  for (const auto& r : rows) os << r.subject << ',' << r.original << ',' << r.shuffled << ',' << r.fold << '\n';
}

}  // namespace cocite
