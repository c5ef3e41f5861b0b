// Acceptance runner: one PASS/FAIL line per criterion.
//   cocite_acceptance            run all criteria
//   cocite_acceptance 3 7        run the listed criteria
// Exit status is 0 when every selected criterion passes.

#include "cocite/classify.hpp"
#include "cocite/cli.hpp"
#include "cocite/diverge.hpp"
#include "cocite/impact.hpp"
#include "cocite/shuffle.hpp"
#include "cocite/simulate.hpp"
#include "cocite/synth.hpp"

#include "oracle.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

using namespace cocite;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SynthConfig synth(std::vector<std::size_t> pubs, std::vector<std::size_t> pools, double p_intra, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_disciplines = pubs.size();
  cfg.pubs_per_discipline = std::move(pubs);
  cfg.ref_pool_per_discipline = std::move(pools);
  cfg.p_intra = p_intra;
  cfg.seed = seed;
  return cfg;
}

// 1. Preservation over 100 seeded repcs runs on 10,000 publications.
void preservation(Verdict& v) {
  const auto t0 = Clock::now();
  const auto c = generate(synth({3334, 3333, 3333}, {13000, 13000, 13000}, 0.85, 101)).full;
  const auto frame = build_groups(c);
  std::size_t bad = 0, deleted = 0, survivors = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto out = repcs_shuffle(frame, seed);
    const auto rep = preservation_report(c, out);
    bad += rep.preserved() ? 0 : 1;
    deleted += out.deleted.size();
    survivors += rep.ref_count_deltas.size();
  }
  const double secs = seconds_since(t0);
  v.require(c.publications().size() == 10'000, "corpus has 10,000 publications");
  v.require(bad == 0, "zero deltas on every run");
  v.require(secs < 60.0, "under 60 s");
  v.detail << c.publications().size() << " pubs, " << c.citation_count() << " citations, 100 runs, " << bad
           << " runs with nonzero deltas, " << survivors << " survivor reports, mean deleted/run "
           << deleted / 100.0 << ", " << std::fixed << std::setprecision(2) << secs << " s";
}

// 2. Composition: local fold == 1 before correction; global on a 1% minority discipline reaches fold >= 5.
void composition(Verdict& v) {
  const auto s = generate(synth({2475, 2475, 50}, {9900, 9900, 400}, 0.9, 202));
  std::size_t non_unit = 0, rows = 0;
  for (const Corpus* c : {&s.full, &s.disciplines[0], &s.disciplines[1], &s.disciplines[2]}) {
    const auto frame = build_groups(*c);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      for (const auto& r :
           composition_fold(*c, repcs_shuffle(frame, seed), {}, CompositionStage::before_correction)) {
        ++rows;
        non_unit += (r.fold != 1 || r.original != r.shuffled) ? 1 : 0;
      }
    }
  }
  v.require(non_unit == 0, "local fold == 1 for every subject");

  const auto& minority = s.disciplines[2];
  const auto frame = build_groups(minority, s.full);
  std::uint64_t best = 0;
  std::string best_subject;
  std::ostringstream table;
  for (const auto& r : composition_fold(minority, repcs_shuffle(frame, 7))) {
    table << r.subject << " o=" << r.original << " s=" << r.shuffled << " fold=" << r.fold << "; ";
    if (r.fold > best) {
      best = r.fold;
      best_subject = r.subject;
    }
  }
  v.require(best >= 5, "global fold >= 5 for some subject");
  const double share = 50.0 / 5000.0;
  v.detail << "local: " << rows << " subject rows over 80 shuffles, " << non_unit << " with fold != 1; global on "
           << share * 100 << "% minority: max fold " << best << " (" << best_subject << "): " << table.str();
}

// 3. K-L ordering over 20 synthetic corpora.
void kl_ordering(Verdict& v) {
  std::vector<double> ratios;
  std::size_t ordered = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto s = generate(synth({700, 700, 700}, {2800, 2800, 2800}, 0.85, 3000 + i));
    const auto& d0 = s.disciplines[0];
    const auto observed = observed_frequencies(d0);
    const auto journals = cited_journals(d0);
    SimConfig cfg;
    cfg.n_simulations = 50;
    cfg.master_seed = i;
    const auto local = kl_divergence(observed, run_simulations(build_groups(d0), cfg).moments, journals);
    cfg.background = Background::global;
    const auto global = kl_divergence(observed, run_simulations(build_groups(d0, s.full), cfg).moments, journals);
    ordered += local.kld < global.kld ? 1 : 0;
    ratios.push_back(global.kld / local.kld);
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = (ratios[9] + ratios[10]) / 2;
  v.require(ordered >= 19, "local < global in >= 19/20");
  v.require(median > 1.5, "median ratio > 1.5");
  v.detail << "local < global in " << ordered << "/20 corpora (2,100 pubs each), ratio min " << ratios.front()
           << ", median " << median << ", max " << ratios.back();
}

// 4. Oracle equivalence on 5 publications, 3 journals, N = 1000.
void oracle_equivalence(Verdict& v) {
  const auto c = oracle::five_pub_corpus();
  const auto expected = oracle::naive_pipeline(c, 2024, 1000);
  SimConfig cfg;
  cfg.n_simulations = 1000;
  cfg.master_seed = 2024;
  const auto stats = zscores(observed_frequencies(c), run_simulations(build_groups(c), cfg).moments);
  double worst = 0;
  std::size_t mismatched = 0;
  for (const auto& s : stats) {
    const auto it = expected.find({s.pair.a(), s.pair.b()});
    if (it == expected.end() || s.defined() != it->second.z.has_value()) {
      ++mismatched;
      continue;
    }
    const auto& row = it->second;
    worst = std::max({worst, std::abs(static_cast<double>(s.f_obs) - row.f_obs), std::abs(s.f_exp - row.f_exp),
                      std::abs(s.sigma - row.sigma), s.defined() ? std::abs(*s.z - *row.z) : 0.0});
  }
  v.require(stats.size() == expected.size() && mismatched == 0, "same pair support and definedness");
  v.require(worst <= 1e-9, "max abs difference <= 1e-9");
  v.detail << stats.size() << " pairs, max abs difference " << std::scientific << worst;
}

// 5. Classification boundaries.
void classification(Verdict& v) {
  const auto mk = [](std::string id, double med, double p10, double p1) { return PubSummary{id, med, p10, p1, 1, {}}; };
  const auto r = classify_corpus({mk("a", 1, 1, 1), mk("b", 2, 0, 0), mk("c", 3, -1e-300, -1)}, {});
  v.require(r.threshold == 2.0, "threshold = median of medians");
  v.require(r.summaries[0].category == Category::LNLC && r.summaries[1].category == Category::LNLC &&
                r.summaries[2].category == Category::HNHC,
            "strict thresholds ([1,2,3] -> LC,LC,HC; p10 = 0 -> LN)");

  const std::vector<double> z{-3, -1, 0, 2, 5};
  const double p10 = percentile(z, 10);
  v.require(p10 == -2.2 && percentile(z, 50) == 0.0, "percentile example gives -2.2 exactly");

  std::mt19937_64 g(5);
  std::normal_distribution<double> normal(0.5, 2.0);
  std::vector<PubSummary> s;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> zs(1 + g() % 60);
    for (auto& x : zs) x = normal(g);
    std::sort(zs.begin(), zs.end());
    s.push_back(mk("p" + std::to_string(i), percentile(zs, 50), percentile(zs, 10), percentile(zs, 1)));
  }
  const auto ten = classify_corpus(s, {10});
  const auto one = classify_corpus(s, {1});
  std::size_t ln_to_hn = 0, hn_to_ln = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool a = is_high_novelty(*ten.summaries[i].category);
    const bool b = is_high_novelty(*one.summaries[i].category);
    ln_to_hn += !a && b;
    hn_to_ln += a && !b;
  }
  v.require(ln_to_hn == 0, "10 -> 1 never converts LN -> HN");
  v.detail << "threshold " << r.threshold << ", p10 example " << p10 << "; over 1,000 random z multisets "
           << ln_to_hn << " LN->HN and " << hn_to_ln << " HN->LN conversions "
           << "(HN means percentile < 0 and p1 <= p10, so the lower percentile can only add HN)";
}

// 6. Chi-square value and validity rule.
void chi_square(Verdict& v) {
  const std::vector<std::uint64_t> obs{10, 20, 30, 40}, sizes{1, 1, 1, 1};
  const auto t = chi_square_gof(obs, sizes);
  const double closed = std::erfc(std::sqrt(10.0)) + std::sqrt(40.0 / std::numbers::pi) * std::exp(-10.0);
  v.require(std::abs(t.statistic - 20.0) < 1e-12 && t.df == 3, "statistic 20, df 3");
  v.require(std::abs(t.p_value - 1.70e-4) <= 1e-6, "p = 1.70e-4 +- 1e-6");
  v.require(std::abs(t.p_value - closed) <= 1e-8 * closed, "matches closed-form df-3 survival function");

  std::mt19937_64 g(6);
  std::size_t disagreements = 0, invalid = 0;
  for (int i = 0; i < 2000; ++i) {
    const std::size_t k = 2 + g() % 3;
    std::vector<std::uint64_t> o(k), n(k);
    for (std::size_t c = 0; c < k; ++c) {
      n[c] = 1 + g() % 200;
      o[c] = g() % 15;
    }
    const auto r = chi_square_gof(o, n);
    const bool all_ge5 = std::all_of(r.expected.begin(), r.expected.end(), [](double e) { return e >= 5.0; });
    disagreements += r.valid != all_ge5;
    invalid += !r.valid;
  }
  v.require(disagreements == 0, "valid iff every expected cell >= 5");
  v.detail << "chi2 " << t.statistic << ", df " << t.df << ", p " << std::setprecision(6) << t.p_value
           << " (closed form " << closed << "); validity rule held on 2,000 random tests (" << invalid << " invalid)";
}

// 7. Hit designation against a sort-and-cut oracle.
void hits(Verdict& v) {
  const auto c = generate(synth({334, 333, 333}, {1400, 1400, 1400}, 0.85, 77)).full;
  const auto pubs = c.publications();
  std::vector<std::uint64_t> desc;
  for (const auto& p : pubs) desc.push_back(p.citations_8yr);
  std::sort(desc.rbegin(), desc.rend());
  std::ostringstream sizes;
  for (int p : {1, 2, 5, 10}) {
    const std::size_t k = (pubs.size() * static_cast<std::size_t>(p) + 99) / 100;
    const std::uint64_t cut = desc[k - 1];
    std::unordered_set<std::string> oracle_hits;
    for (const auto& x : pubs) {
      if (x.citations_8yr >= cut) oracle_hits.insert(x.pub_id);
    }
    const auto got = designate_hits(pubs, {p});
    v.require(got == oracle_hits, "oracle equality at " + std::to_string(p) + "%");
    sizes << p << "%: " << got.size() << " hits (cut " << cut << "); ";
  }
  std::vector<Publication> flat;
  for (int i = 0; i < 1000; ++i) flat.push_back({"f" + std::to_string(i), 2000, "J", {}, 17});
  bool all = true;
  for (int p : {1, 2, 5, 10}) all = all && designate_hits(flat, {p}).size() == flat.size();
  v.require(all, "all-equal counts make every publication a hit");
  v.detail << pubs.size() << " pubs, max count " << desc.front() << "; " << sizes.str() << "all-equal case "
           << (all ? "all hits" : "not all hits");
}

template <typename F>
double median_of_3(F&& f) {
  std::array<double, 3> t{f(), f(), f()};
  std::sort(t.begin(), t.end());
  return t[1];
}

// 8. repcs vs umsj at 100k citations; 1,000 simulations at 1M citations.
void performance(Verdict& v) {
  const auto small = generate(synth({2800, 2800, 2800}, {11200, 11200, 11200}, 0.85, 808)).full;
  const auto frame = build_groups(small);
  SimConfig cfg;
  cfg.n_simulations = 10;
  cfg.master_seed = 42;
  cfg.workers = 1;
  auto time_algo = [&](Algorithm a, bool full) {
    cfg.algorithm = a;
    return median_of_3([&] {
      if (!full) return time_shuffles(frame, cfg);
      const auto t0 = Clock::now();
      run_simulations(frame, cfg);
      return seconds_since(t0);
    });
  };
  const double rs = time_algo(Algorithm::repcs, false), us = time_algo(Algorithm::umsj, false);
  const double rt = time_algo(Algorithm::repcs, true), ut = time_algo(Algorithm::umsj, true);
  v.require(rs * 10 <= us, "repcs shuffle wall-time <= umsj / 10");

  const auto big = generate(synth({28000, 28000, 28000}, {112000, 112000, 112000}, 0.85, 809)).full;
  const auto big_frame = build_groups(big);
  SimConfig big_cfg;
  big_cfg.n_simulations = 1000;
  big_cfg.master_seed = 42;
  const auto t0 = Clock::now();
  const auto r = run_simulations(big_frame, big_cfg);
  const double big_secs = seconds_since(t0);
  v.require(big.citation_count() >= 1'000'000, "1M-citation corpus");
  v.require(big_secs < 600.0, "1,000 simulations under 10 minutes");

  v.detail << std::fixed << std::setprecision(4) << small.citation_count()
           << " citations, 10 sims, 1 worker: shuffle repcs " << rs << " s vs umsj " << us << " s (ratio "
           << std::setprecision(1) << us / rs << "x); end-to-end incl. shared pair counting " << std::setprecision(4)
           << rt << " s vs " << ut << " s (" << std::setprecision(1) << ut / rt << "x); " << big.citation_count()
           << " citations x 1,000 sims: " << std::setprecision(1) << big_secs << " s on "
           << std::thread::hardware_concurrency() << " hardware thread(s), " << r.moments.size() << " pairs";
}

// 9. Manifest reruns are byte-identical for 1, 4 and 8 workers.
void determinism(Verdict& v) {
  testing::TempDir dir;
  std::ostringstream out, err;
  const auto run = [&](std::vector<std::string> args) { return cli::run(args, out, err); };
  bool ok = run({"synth", "--pubs-per-discipline", "400", "--ref-pool", "1600", "--seed", "9", "--out",
                 (dir / "corpus").string()}) == 0;
  const auto in = dir / "corpus";
  ok = ok && run({"pipeline", "--pubs", (in / "D1" / "publications.tsv").string(), "--refs",
                  (in / "D1" / "references.tsv").string(), "--cites", (in / "D1" / "citations.tsv").string(),
                  "--pool-pubs", (in / "full" / "publications.tsv").string(), "--pool-refs",
                  (in / "full" / "references.tsv").string(), "--pool-cites", (in / "full" / "citations.tsv").string(),
                  "--background", "global", "--sims", "200", "--seed", "42", "--workers", "2", "--out",
                  (dir / "base").string()}) == 0;
  v.require(ok, "base run succeeds: " + err.str());
  std::vector<fs::path> outputs;
  for (const auto& e : fs::directory_iterator(dir / "base")) {
    if (e.path().filename() != "run.manifest") outputs.push_back(e.path().filename());
  }
  std::sort(outputs.begin(), outputs.end());
  std::size_t identical = 0, compared = 0;
  for (const std::string w : {"1", "4", "8"}) {
    const auto target = dir / ("w" + w);
    v.require(run({"rerun", "--manifest", (dir / "base" / "run.manifest").string(), "--out", target.string(),
                   "--workers", w}) == 0,
              "rerun with " + w + " workers");
    for (const auto& f : outputs) {
      ++compared;
      identical += testing::read_text(dir / "base" / f) == testing::read_text(target / f) ? 1 : 0;
    }
  }
  v.require(!outputs.empty() && identical == compared, "byte-identical outputs");
  v.detail << outputs.size() << " output files x 3 worker counts: " << identical << "/" << compared
           << " byte-identical";
}

// 10. K-L unit values.
void kl_units(Verdict& v) {
  JournalPairTable p;
  p.add({"A", "B"}, 1);
  p.add({"A", "C"}, 1);
  std::map<JournalPair, double> same{{{"A", "B"}, 1.0}, {{"A", "C"}, 1.0}};
  const std::map<JournalPair, double> q{{{"A", "B"}, 0.25}, {{"A", "C"}, 0.75}};
  const double self = kl_divergence(p, same, {"A", "B", "C"}, 1e-12).kld;
  const double two_bin = kl_divergence(p, q, {"A", "B", "C"}, 1e-12).kld;
  v.require(self == 0.0, "D(P||P) == 0 exactly");
  v.require(std::abs(two_bin - 0.20752) <= 1e-4, "two-bin example 0.20752 +- 1e-4");
  v.detail << "D(P||P) = " << self << ", two-bin = " << std::setprecision(8) << two_bin << " bits";
}

struct Criterion {
  int id;
  const char* name;
  void (*check)(Verdict&);
};

const std::vector<Criterion> kCriteria{
    {1, "preservation", preservation},   {2, "composition fidelity", composition},
    {3, "K-L ordering", kl_ordering},    {4, "oracle equivalence", oracle_equivalence},
    {5, "classification", classification}, {6, "chi-square", chi_square},
    {7, "hit designation", hits},        {8, "performance", performance},
    {9, "determinism", determinism},     {10, "K-L unit values", kl_units},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  bool all_pass = true;
  for (const auto& c : kCriteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    Verdict v;
    try {
      c.check(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "[exception: " << e.what() << "]";
    }
    all_pass = all_pass && v.pass;
    std::cout << "criterion " << std::setw(2) << c.id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << c.name
              << " | " << v.detail.str() << std::endl;
  }
  return all_pass ? 0 : 1;
}
