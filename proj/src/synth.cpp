#include "cocite/synth.hpp"

#include "cocite/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace cocite {

void SynthConfig::validate() const {
  if (n_disciplines == 0) throw ConfigError("synth: need at least one discipline");
  if (pubs_per_discipline.size() != n_disciplines || ref_pool_per_discipline.size() != n_disciplines) {
    throw ConfigError("synth: per-discipline sizes must list one value per discipline");
  }
  if (journals_per_discipline == 0) throw ConfigError("synth: journals_per_discipline must be positive");
  if (!(p_intra >= 0.0 && p_intra <= 1.0)) throw ConfigError("synth: p_intra must lie in [0, 1]");
  if (refs_per_pub.min < 2) throw ConfigError("synth: minimum reference count must be >= 2");
  if (refs_per_pub.max < refs_per_pub.min) throw ConfigError("synth: reference count max < min");
  if (refs_per_pub.mean < static_cast<double>(refs_per_pub.min)) {
    throw ConfigError("synth: mean reference count below the minimum");
  }
  if (!(refs_per_pub.dispersion > 0.0)) throw ConfigError("synth: dispersion must be positive");
  if (ref_year_span < 1) throw ConfigError("synth: ref_year_span must be >= 1");
  if (skew < 0.0) throw ConfigError("synth: skew must be >= 0");
  for (auto pool : ref_pool_per_discipline) {
    if (pool < refs_per_pub.max) {
      throw ConfigError("synth: reference pool of " + std::to_string(pool) +
                        " is too small to draw up to " + std::to_string(refs_per_pub.max) +
                        " distinct references");
    }
  }
}

ZipfSampler::ZipfSampler(std::size_t n, double exponent) : cdf_(n) {
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    acc += std::pow(static_cast<double>(r + 1), -exponent);
    cdf_[r] = acc;
  }
  for (auto& c : cdf_) c /= acc;
}

std::size_t ZipfSampler::operator()(StreamRng& rng) const {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return it == cdf_.end() ? cdf_.size() - 1 : static_cast<std::size_t>(it - cdf_.begin());
}

std::string discipline_label(std::size_t d) { return "D" + std::to_string(d); }

namespace {

std::string journal_id(std::size_t d, std::size_t j) {
  // ISSN-shaped: dddd-jjjj
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04zu-%04zu", d, j);
  return buf;
}

}  // namespace

SynthCorpus generate(const SynthConfig& cfg) {
  cfg.validate();
  StreamRng rng(cfg.seed, streams::synth, 0);
  const std::size_t D = cfg.n_disciplines;

  // Reference pools; rank order within a pool is popularity order.
  std::vector<ReferenceRecord> refs;
  std::vector<std::vector<RefIndex>> pool(D);
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t i = 0; i < cfg.ref_pool_per_discipline[d]; ++i) {
      ReferenceRecord r;
      r.ref_id = "r" + std::to_string(d) + "-" + std::to_string(i);
      r.year = cfg.slice_year - static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.ref_year_span)));
      r.journal_id = journal_id(d, rng.below(cfg.journals_per_discipline));
      r.subject = discipline_label(d);
      pool[d].push_back(static_cast<RefIndex>(refs.size()));
      refs.push_back(std::move(r));
    }
  }
  std::vector<ZipfSampler> popularity;
  for (std::size_t d = 0; d < D; ++d) popularity.emplace_back(pool[d].size(), cfg.skew);

  const double extra_mean = cfg.refs_per_pub.mean - static_cast<double>(cfg.refs_per_pub.min);
  std::gamma_distribution<double> rate(cfg.refs_per_pub.dispersion,
                                       extra_mean > 0 ? extra_mean / cfg.refs_per_pub.dispersion : 1.0);
  std::lognormal_distribution<double> impact(cfg.citation_log_mean, cfg.citation_log_sigma);

  std::vector<Publication> all;
  std::vector<std::vector<Publication>> by_discipline(D);
  std::unordered_set<RefIndex> chosen;
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t i = 0; i < cfg.pubs_per_discipline[d]; ++i) {
      Publication p;
      p.pub_id = "p" + std::to_string(d) + "-" + std::to_string(i);
      p.year = cfg.slice_year;
      p.journal_id = journal_id(d, rng.below(cfg.journals_per_discipline));

      std::size_t n = cfg.refs_per_pub.min;
      if (extra_mean > 0) {
        std::poisson_distribution<std::size_t> extra(rate(rng));
        n += extra(rng);
      }
      n = std::min(n, cfg.refs_per_pub.max);

      chosen.clear();
      while (p.refs.size() < n) {
        std::size_t target = d;
        if (D > 1 && rng.uniform01() >= cfg.p_intra) {
          target = rng.below(D - 1);
          if (target >= d) ++target;
        }
        const RefIndex r = pool[target][popularity[target](rng)];
        if (chosen.insert(r).second) p.refs.push_back(r);
      }
      p.citations_8yr = static_cast<std::uint64_t>(std::floor(impact(rng)));
      by_discipline[d].push_back(p);
      all.push_back(std::move(p));
    }
  }

  SynthCorpus out;
  for (std::size_t d = 0; d < D; ++d) out.labels.push_back(discipline_label(d));

  // Discipline corpora keep only the references their publications cite, in global table order.
  for (std::size_t d = 0; d < D; ++d) {
    std::vector<RefIndex> remap(refs.size(), static_cast<RefIndex>(-1));
    std::vector<bool> used(refs.size(), false);
    for (const auto& p : by_discipline[d]) {
      for (RefIndex r : p.refs) used[r] = true;
    }
    std::vector<ReferenceRecord> local_refs;
    for (std::size_t r = 0; r < refs.size(); ++r) {
      if (!used[r]) continue;
      remap[r] = static_cast<RefIndex>(local_refs.size());
      local_refs.push_back(refs[r]);
    }
    for (auto& p : by_discipline[d]) {
      for (auto& r : p.refs) r = remap[r];
    }
    out.disciplines.emplace_back(cfg.slice_year, Background::local, std::move(local_refs),
                                 std::move(by_discipline[d]));
  }
  out.full = Corpus(cfg.slice_year, Background::global, std::move(refs), std::move(all));
  return out;
}

}  // namespace cocite
