#include "cocite/error.hpp"
#include "cocite/shuffle.hpp"
#include "cocite/synth.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace cocite;
using testing::CorpusBuilder;

namespace {

std::vector<std::string> ref_ids(const Corpus& c, const Publication& p) {
  std::vector<std::string> out;
  for (RefIndex r : p.refs) out.push_back(c.reference(r).ref_id);
  return out;
}

const Publication& pub_named(const Corpus& c, const std::string& id) {
  return c.publications()[c.find_publication(id).value()];
}

// year -> multiset of ref ids over the given publications
std::map<int, std::multiset<std::string>> tokens_by_year(std::span<const ReferenceRecord> refs,
                                                         std::span<const Publication> pubs) {
  std::map<int, std::multiset<std::string>> out;
  for (const auto& p : pubs) {
    for (RefIndex r : p.refs) out[refs[r].year].insert(refs[r].ref_id);
  }
  return out;
}

std::vector<Publication> all_shuffled(const ShuffleOutcome& o) {
  std::vector<Publication> out(o.corpus.publications().begin(), o.corpus.publications().end());
  out.insert(out.end(), o.deleted.begin(), o.deleted.end());
  return out;
}

Corpus synth_corpus(std::size_t pubs_per_discipline, std::uint64_t seed, double p_intra = 0.85) {
  SynthConfig cfg;
  cfg.pubs_per_discipline.assign(3, pubs_per_discipline);
  cfg.ref_pool_per_discipline.assign(3, std::max<std::size_t>(4 * pubs_per_discipline, 200));
  cfg.p_intra = p_intra;
  cfg.seed = seed;
  return generate(cfg).full;
}

// Three publications, one 3-slot group of distinct tokens plus a private ref each.
Corpus three_slot_corpus() {
  return CorpusBuilder()
      .ref("A", 1990, "JA")
      .ref("B", 1990, "JB")
      .ref("C", 1990, "JC")
      .ref("X1", 1991, "JX")
      .ref("X2", 1992, "JX")
      .ref("X3", 1993, "JX")
      .pub("p1", {"A", "X1"})
      .pub("p2", {"B", "X2"})
      .pub("p3", {"C", "X3"})
      .build();
}

}  // namespace

TEST_SUITE("shuffle") {

TEST_CASE("groups split citations by reference year") {
  const auto c = CorpusBuilder()
                     .ref("a", 1980, "J1")
                     .ref("b", 1980, "J2")
                     .ref("c", 1980, "J3")
                     .ref("d", 1982, "J1")
                     .ref("e", 1982, "J2")
                     .pub("p1", {"a", "d"})
                     .pub("p2", {"b", "c", "e"})
                     .build();
  const auto frame = build_groups(c);
  REQUIRE(frame.groups.size() == 2);
  CHECK(frame.groups[0].year == 1980);
  CHECK(frame.groups[0].slots.size() == 3);
  CHECK(frame.groups[1].year == 1982);
  CHECK(frame.groups[1].slots.size() == 2);
  for (const auto& g : frame.groups) {
    CHECK(g.slots.size() == g.tokens.size());
    CHECK(g.n_local == g.slots.size());
    for (RefIndex t : g.tokens) CHECK(frame.references[t].year == g.year);
  }
}

TEST_CASE("local groups partition the corpus citations") {
  const auto c = synth_corpus(100, 3);
  const auto frame = build_groups(c);
  std::map<int, std::multiset<std::string>> from_groups;
  std::size_t slots = 0;
  for (const auto& g : frame.groups) {
    slots += g.slots.size();
    for (std::size_t i = 0; i < g.slots.size(); ++i) {
      const auto& s = g.slots[i];
      CHECK(c.publications()[s.pub].refs[s.position] == g.tokens[i]);
      from_groups[g.year].insert(c.reference(g.tokens[i]).ref_id);
    }
  }
  CHECK(slots == c.citation_count());
  CHECK(frame.local_citations() == c.citation_count());
  CHECK(from_groups == tokens_by_year(c.references(), c.publications()));
}

TEST_CASE("global groups contain pool-only tokens") {
  const auto pool = CorpusBuilder()
                        .ref("A", 1990, "J1")
                        .ref("B", 1990, "J2")
                        .ref("Z", 1990, "J9", "Entomology")
                        .ref("C", 1991, "J3")
                        .pub("p1", {"A", "B"})
                        .pub("p2", {"Z", "C"})
                        .build(Background::global);
  const auto corpus = CorpusBuilder().ref("A", 1990, "J1").ref("B", 1990, "J2").pub("p1", {"A", "B"}).build();
  const auto frame = build_groups(corpus, pool);
  REQUIRE(frame.groups.size() == 2);
  const auto& g = frame.groups[0];
  CHECK(g.n_local == 2);
  CHECK(g.slots.size() == 3);
  std::set<std::string> ids;
  for (RefIndex t : g.tokens) ids.insert(frame.references[t].ref_id);
  CHECK(ids.contains("Z"));
  CHECK(frame.n_local_pubs == 1);
}

TEST_CASE("global groups reject a corpus year the pool lacks") {
  const auto pool = CorpusBuilder().ref("A", 1990, "J1").ref("B", 1990, "J2").pub("p1", {"A", "B"}).build();
  const auto corpus = CorpusBuilder().ref("A", 1990, "J1").ref("Q", 1985, "J2").pub("p9", {"A", "Q"}).build();
  CHECK_THROWS_AS(build_groups(corpus, pool), DataError);
  const auto other_year = CorpusBuilder(2001).ref("A", 1990, "J1").ref("B", 1990, "J2").pub("p", {"A", "B"}).build();
  CHECK_THROWS_AS(build_groups(other_year, pool), DataError);
}

TEST_CASE("a single-slot group keeps its token as a fixed point") {
  const auto c = CorpusBuilder().ref("A", 1990, "J1").ref("B", 1991, "J2").pub("p", {"A", "B"}).build();
  const auto frame = build_groups(c);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto out = repcs_shuffle(frame, seed);
    CHECK(out.fixed_points == 2);
    CHECK(out.deleted.empty());
    CHECK(ref_ids(out.corpus, out.corpus.publications()[0]) == std::vector<std::string>{"A", "B"});
  }
}

TEST_CASE("repcs deals a 3-slot group uniformly") {
  const auto frame = build_groups(three_slot_corpus());
  std::map<std::string, int> counts;
  constexpr int kTrials = 10'000;
  for (int seed = 0; seed < kTrials; ++seed) {
    const auto out = repcs_shuffle(frame, static_cast<std::uint64_t>(seed));
    REQUIRE(out.deleted.empty());
    std::string perm;
    for (const auto& p : out.corpus.publications()) perm += out.corpus.reference(p.refs[0]).ref_id;
    ++counts[perm];
  }
  REQUIRE(counts.size() == 6);
  double chi2 = 0;
  for (const auto& [perm, n] : counts) {
    CHECK(static_cast<double>(n) / kTrials == doctest::Approx(1.0 / 6).epsilon(0.12));
    CHECK(std::abs(static_cast<double>(n) / kTrials - 1.0 / 6) < 0.02);
    const double e = kTrials / 6.0;
    chi2 += (n - e) * (n - e) / e;
  }
  // 99.9% quantile of chi-square with 5 degrees of freedom
  CHECK(chi2 < 20.52);
}

TEST_CASE("repcs deletes exactly the publications that received a duplicate") {
  const auto c = CorpusBuilder()
                     .ref("A", 1990, "J1")
                     .ref("B", 1990, "J2")
                     .ref("C", 1991, "J3")
                     .pub("p1", {"A", "B"})
                     .pub("p2", {"A", "C"})
                     .build();
  const auto frame = build_groups(c);
  int saw_aa = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ShuffleWorkspace ws(frame);
    const auto stats = ws.run_repcs(seed, 0);
    const auto out = repcs_shuffle(frame, seed);
    CHECK(out.deleted.size() == stats.deleted);
    for (std::size_t p = 0; p < ws.n_local_pubs(); ++p) {
      const auto refs = ws.refs(p);
      const std::set<RefIndex> distinct(refs.begin(), refs.end());
      CHECK(ws.deleted(p) == (distinct.size() != refs.size()));
    }
    for (const auto& d : out.deleted) {
      if (d.pub_id == "p1" && ref_ids(c, d) == std::vector<std::string>{"A", "A"}) {
        ++saw_aa;
        CHECK_FALSE(out.corpus.find_publication("p1"));
        const auto ids = out.deleted_ids();
        CHECK(std::find(ids.begin(), ids.end(), "p1") != ids.end());
      }
    }
  }
  CHECK(saw_aa > 0);
}

TEST_CASE("umsj applies the single admissible swap") {
  const auto c = CorpusBuilder()
                     .ref("A", 1990, "J1")
                     .ref("B", 1990, "J2")
                     .ref("X", 1991, "J3")
                     .ref("Y", 1992, "J4")
                     .pub("p1", {"A", "X"})
                     .pub("p2", {"B", "Y"})
                     .build();
  const auto frame = build_groups(c);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto out = umsj_shuffle(frame, seed);
    CHECK(out.deleted.empty());
    CHECK(ref_ids(out.corpus, pub_named(out.corpus, "p1")) == std::vector<std::string>{"B", "X"});
    CHECK(ref_ids(out.corpus, pub_named(out.corpus, "p2")) == std::vector<std::string>{"A", "Y"});
    // the second slot of the 1990 group finds no admissible move; the 1991 and 1992 groups have one slot
    CHECK(out.retry_exhausted == 3);
  }
}

TEST_CASE("umsj leaves a fully blocked group unchanged") {
  const auto c = CorpusBuilder()
                     .ref("A", 1990, "J1")
                     .ref("B", 1990, "J2")
                     .pub("p1", {"A", "B"})
                     .pub("p2", {"A", "B"})
                     .build();
  const auto frame = build_groups(c);
  const auto out = umsj_shuffle(frame, 1);
  CHECK(out.retry_exhausted == 4);
  CHECK(out.corpus == Corpus(c.slice_year(), c.background(), frame.references,
                             {c.publications().begin(), c.publications().end()}));
  CHECK(out.fixed_points == 4);
}

TEST_CASE("umsj never produces duplicates or restores originals on switched slots") {
  const auto c = synth_corpus(150, 8);
  const auto frame = build_groups(c);
  const auto out = umsj_shuffle(frame, 77);
  CHECK(out.deleted.empty());
  CHECK(out.corpus.publications().size() == c.publications().size());
}

TEST_CASE("both algorithms preserve per-year token multisets on a 10,000-citation corpus") {
  const auto c = synth_corpus(280, 21);
  REQUIRE(c.citation_count() >= 10'000);
  const auto frame = build_groups(c);
  const auto original = tokens_by_year(c.references(), c.publications());
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = repcs_shuffle(frame, seed);
    const auto u = umsj_shuffle(frame, seed);
    const auto rp = all_shuffled(r);
    const auto up = all_shuffled(u);
    CHECK(tokens_by_year(r.corpus.references(), rp) == original);
    CHECK(tokens_by_year(u.corpus.references(), up) == original);
  }
}

TEST_CASE("global shuffle gives a local slot each union token with equal probability") {
  const auto pool = CorpusBuilder()
                        .ref("A", 1990, "J1")
                        .ref("B", 1990, "J2")
                        .ref("C", 1990, "J3")
                        .ref("D", 1990, "J4")
                        .ref("X", 1991, "J5")
                        .ref("Y", 1991, "J6")
                        .pub("p1", {"A", "X"})
                        .pub("p2", {"B", "C", "Y"})
                        .pub("p3", {"D", "X"})
                        .build(Background::global);
  const auto corpus = CorpusBuilder().ref("A", 1990, "J1").ref("X", 1991, "J5").pub("p1", {"A", "X"}).build();
  const auto frame = build_groups(corpus, pool);
  std::map<std::string, int> counts;
  constexpr int kTrials = 8000;
  for (int seed = 0; seed < kTrials; ++seed) {
    ShuffleWorkspace ws(frame);
    ws.run_repcs(static_cast<std::uint64_t>(seed), 0);
    ++counts[frame.references[ws.refs(0)[0]].ref_id];
  }
  REQUIRE(counts.size() == 4);
  for (const auto& [id, n] : counts) CHECK(std::abs(n / double(kTrials) - 0.25) < 0.02);
}

TEST_CASE("shuffles are deterministic and workspaces are reusable") {
  const auto c = synth_corpus(60, 4);
  const auto frame = build_groups(c);
  ShuffleWorkspace ws(frame);
  for (std::uint32_t sim = 0; sim < 5; ++sim) {
    const auto a = repcs_shuffle(frame, 99, sim);
    const auto b = repcs_shuffle(frame, 99, sim);
    CHECK(a.corpus == b.corpus);
    CHECK(a.deleted == b.deleted);
    ws.run_repcs(99, sim);
    for (std::size_t p = 0, s = 0; p < ws.n_local_pubs(); ++p) {
      if (ws.deleted(p)) continue;
      const auto refs = ws.refs(p);
      CHECK(std::vector<RefIndex>(refs.begin(), refs.end()) == a.corpus.publications()[s++].refs);
    }
    const auto u1 = umsj_shuffle(frame, 99, 10, sim);
    const auto u2 = umsj_shuffle(frame, 99, 10, sim);
    CHECK(u1.corpus == u2.corpus);
  }
  CHECK_FALSE(repcs_shuffle(frame, 1).corpus == repcs_shuffle(frame, 2).corpus);
}

TEST_CASE("preservation report") {
  const auto c = synth_corpus(50, 6);
  const auto frame = build_groups(c);
  const auto out = repcs_shuffle(frame, 5);
  const auto rep = preservation_report(c, out);
  CHECK(rep.preserved());
  CHECK(rep.publication_delta == out.deleted.size());

  // hand-made outcome with three publications removed
  std::vector<Publication> kept(c.publications().begin() + 3, c.publications().end());
  ShuffleOutcome manual;
  manual.corpus = Corpus(c.slice_year(), c.background(), {c.references().begin(), c.references().end()}, kept);
  manual.deleted.assign(c.publications().begin(), c.publications().begin() + 3);
  const auto rep3 = preservation_report(c, manual);
  CHECK(rep3.publication_delta == 3);
  CHECK(rep3.preserved());

  // moving a citation to another year is caught
  auto bent = kept;
  const auto& refs = c.references();
  for (auto& r : bent[0].refs) {
    const auto other = std::find_if(refs.begin(), refs.end(), [&](const ReferenceRecord& x) {
      return x.year != refs[r].year &&
             std::find(bent[0].refs.begin(), bent[0].refs.end(), RefIndex(&x - refs.data())) == bent[0].refs.end();
    });
    r = static_cast<RefIndex>(other - refs.begin());
    break;
  }
  manual.corpus = Corpus(c.slice_year(), c.background(), {refs.begin(), refs.end()}, bent);
  CHECK_FALSE(preservation_report(c, manual).preserved());
}

TEST_CASE("1,000-publication corpus keeps all deltas zero over 100 seeds") {
  SynthConfig cfg;
  cfg.pubs_per_discipline = {400, 300, 300};
  cfg.ref_pool_per_discipline = {1600, 1200, 1200};
  cfg.seed = 2;
  const auto c = generate(cfg).full;
  const auto frame = build_groups(c);
  ShuffleWorkspace ws(frame);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto out = repcs_shuffle(frame, seed);
    const auto rep = preservation_report(c, out);
    REQUIRE(rep.preserved());
    CHECK(rep.publication_delta == out.deleted.size());
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(preservation_report(c, umsj_shuffle(frame, seed)).preserved());
}

}
