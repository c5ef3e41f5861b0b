#include "cocite/diverge.hpp"
#include "cocite/error.hpp"
#include "cocite/synth.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace cocite;

TEST_SUITE("diverge") {

TEST_CASE("divergence of a table from itself is zero") {
  JournalPairTable t;
  t.add({"A", "B"}, 3);
  t.add({"A", "A"}, 9);
  t.add({"B", "C"}, 1);
  std::map<JournalPair, double> same;
  for (const auto& [k, f] : t) same[k] = static_cast<double>(f);
  for (double eps : {1e-12, 1e-3, 1.0}) {
    const auto r = kl_divergence(t, same, {"A", "B", "C"}, eps);
    CHECK(r.kld == 0.0);
    CHECK(r.n_support == 3);
    CHECK(r.epsilon == eps);
  }
}

TEST_CASE("two-bin hand example") {
  JournalPairTable p;
  p.add({"A", "B"}, 1);
  p.add({"A", "C"}, 1);
  const std::map<JournalPair, double> q{{{"A", "B"}, 0.25}, {{"A", "C"}, 0.75}};
  const auto bits = kl_divergence(p, q, {"A", "B", "C"}, 1e-12);
  const double expected = 0.5 * std::log2(2.0) + 0.5 * std::log2(2.0 / 3.0);
  CHECK(std::abs(bits.kld - 0.20752) < 1e-4);
  CHECK(std::abs(bits.kld - expected) < 1e-10);
  const auto nats = kl_divergence(p, q, {"A", "B", "C"}, 1e-12, LogBase::nats);
  CHECK(nats.kld == doctest::Approx(expected * std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("journal filter and union support") {
  JournalPairTable p;
  p.add({"A", "B"}, 5);
  p.add({"A", "X"}, 50);  // filtered out
  const std::map<JournalPair, double> q{{{"A", "B"}, 2.0}, {{"B", "B"}, 2.0}, {{"X", "X"}, 7.0}};
  const auto r = kl_divergence(p, q, {"A", "B"});
  CHECK(r.n_support == 2);
  // P = [1, 0], Q = [0.5, 0.5] up to epsilon
  CHECK(r.kld == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(kl_divergence(p, q, {"Q"}), DataError);
  CHECK_THROWS_AS(kl_divergence(p, q, {"A", "B"}, 0.0), ConfigError);
  CHECK_THROWS_AS(kl_divergence(p, std::map<JournalPair, double>{}, {"A", "B"}), DataError);
}

TEST_CASE("moment table overload uses the means") {
  JournalPairTable p;
  p.add({"A", "B"}, 1);
  p.add({"A", "C"}, 1);
  const MomentTable m{{{"A", "B"}, {0.25, 9.0}}, {{"A", "C"}, {0.75, 0.0}}};
  CHECK(std::abs(kl_divergence(p, m, {"A", "B", "C"}).kld - 0.2075187496) < 1e-9);
}

TEST_CASE("fold difference") {
  CHECK(fold_difference(1, 1496) == 1496);
  CHECK(fold_difference(1496, 1) == 1496);
  CHECK(fold_difference(5, 5) == 1);
  CHECK(fold_difference(0, 0) == 1);
  CHECK(fold_difference(0, 7) == 7);
  CHECK(fold_difference(10, 25) == 3);  // 2.5 rounds up
  CHECK(fold_difference(3, 10) == 3);
  CHECK(fold_difference(4, 7) == 2);
  CHECK(fold_difference(100, 149) == 1);
}

TEST_CASE("local repcs keeps subject composition before error correction") {
  SynthConfig cfg;
  cfg.pubs_per_discipline = {200, 200, 200};
  cfg.ref_pool_per_discipline = {900, 900, 900};
  const auto s = generate(cfg);
  for (const auto& corpus : {s.full, s.disciplines[1]}) {
    const auto frame = build_groups(corpus);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto out = repcs_shuffle(frame, seed);
      const auto rows = composition_fold(corpus, out, {}, CompositionStage::before_correction);
      REQUIRE_FALSE(rows.empty());
      for (const auto& r : rows) {
        CHECK(r.original == r.shuffled);
        CHECK(r.fold == 1);
      }
      const auto after = composition_fold(corpus, out);
      std::uint64_t lost = 0;
      for (const auto& p : out.deleted) lost += p.refs.size();
      std::uint64_t o = 0, sh = 0;
      for (const auto& r : after) {
        o += r.original;
        sh += r.shuffled;
      }
      CHECK(o - sh == lost);
    }
  }
}

TEST_CASE("composition rows cover requested subjects") {
  const auto c = testing::CorpusBuilder()
                     .ref("a", 1990, "J1", "Physics")
                     .ref("b", 1990, "J2", "Physics")
                     .ref("c", 1991, "J3", "Biology")
                     .pub("p", {"a", "b", "c"})
                     .build();
  const auto out = repcs_shuffle(build_groups(c), 1);
  const auto rows = composition_fold(c, out, {"Biology", "Genetics"});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].subject == "Biology");
  CHECK(rows[0].original == 1);
  CHECK(rows[1].subject == "Genetics");
  CHECK(rows[1].original == 0);
  CHECK(rows[1].shuffled == 0);
  CHECK(rows[1].fold == 1);

  std::ostringstream os;
  write_composition_csv(os, rows);
  CHECK(os.str() == "subject,o,s,fold\nBiology,1,1,1\nGenetics,0,0,1\n");
  CHECK(cited_journals(c) == std::set<std::string>{"J1", "J2", "J3"});
}

}
