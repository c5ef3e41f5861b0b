#include "cocite/impact.hpp"

#include "cocite/error.hpp"
#include "cocite/format.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace cocite {

void HitConfig::validate() const {
  if (hit_percentile != 1 && hit_percentile != 2 && hit_percentile != 5 && hit_percentile != 10) {
    throw ConfigError("hit percentile must be one of 1, 2, 5, 10; got " + std::to_string(hit_percentile));
  }
}

std::unordered_set<std::string> designate_hits(std::span<const Publication> pubs, const HitConfig& cfg) {
  cfg.validate();
  if (pubs.empty()) throw DataError("cannot designate hits in an empty corpus");

  std::vector<std::uint64_t> counts;
  counts.reserve(pubs.size());
  for (const auto& p : pubs) counts.push_back(p.citations_8yr);
  std::sort(counts.begin(), counts.end());

  // Rank h = (100 - p)(n - 1) / 100 kept as integer quotient and remainder.
  const auto q = static_cast<std::uint64_t>(100 - cfg.hit_percentile);
  const std::uint64_t scaled = q * (counts.size() - 1);
  const std::uint64_t lo = scaled / 100;
  const bool on_order_statistic = scaled % 100 == 0;
  // The interpolated cutoff lies strictly above counts[lo] unless it hits an
  // order statistic or the neighbours are equal; counts are integers.
  const std::uint64_t cutoff =
      (on_order_statistic || counts[lo + 1] == counts[lo]) ? counts[lo] : counts[lo + 1];

  std::unordered_set<std::string> hits;
  for (const auto& p : pubs) {
    if (p.citations_8yr >= cutoff) hits.insert(p.pub_id);
  }
  return hits;
}

double chi_square_sf(double statistic, int df) {
  if (df <= 0) throw ConfigError("chi-square degrees of freedom must be positive");
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

ChiSquareTest chi_square_gof(std::span<const std::uint64_t> observed, std::span<const std::uint64_t> sizes) {
  ChiSquareTest t;
  std::uint64_t total_hits = 0, total_size = 0;
  for (auto o : observed) total_hits += o;
  for (auto s : sizes) total_size += s;

  t.df = static_cast<int>(observed.size()) - 1;
  t.valid = total_size > 0;
  for (std::size_t c = 0; c < observed.size(); ++c) {
    const double e = total_size == 0 ? 0.0
                                     : static_cast<double>(total_hits) * static_cast<double>(sizes[c]) /
                                           static_cast<double>(total_size);
    const double o = static_cast<double>(observed[c]);
    t.expected.push_back(e);
    t.direction.push_back(o > e ? 1 : (o < e ? -1 : 0));
    if (e < 5.0) t.valid = false;
    if (e > 0.0) t.statistic += (o - e) * (o - e) / e;
  }
  t.p_value = t.df > 0 ? chi_square_sf(t.statistic, t.df) : 1.0;
  return t;
}

HitReport hit_report(std::span<const PubSummary> summaries, const std::unordered_set<std::string>& hits) {
  HitReport r;
  for (const auto& s : summaries) {
    if (!s.category) throw DataError("publication " + s.pub_id + " has no category");
    auto& c = r.categories[static_cast<std::size_t>(*s.category)];
    ++c.n_articles;
    if (hits.contains(s.pub_id)) ++c.n_hits;
  }
  for (auto& c : r.categories) {
    c.hit_rate = c.n_articles == 0 ? 0.0 : static_cast<double>(c.n_hits) / static_cast<double>(c.n_articles);
    r.total_articles += c.n_articles;
    r.total_hits += c.n_hits;
  }

  const auto& cat = r.categories;
  const auto at = [&](Category c) { return cat[static_cast<std::size_t>(c)]; };
  std::array<std::uint64_t, 4> obs{}, size{};
  for (std::size_t i = 0; i < 4; ++i) {
    obs[i] = cat[i].n_hits;
    size[i] = cat[i].n_articles;
  }
  r.chi2_4cat = chi_square_gof(obs, size);

  const std::array<std::uint64_t, 2> nov_obs{at(Category::LNLC).n_hits + at(Category::LNHC).n_hits,
                                             at(Category::HNLC).n_hits + at(Category::HNHC).n_hits};
  const std::array<std::uint64_t, 2> nov_size{at(Category::LNLC).n_articles + at(Category::LNHC).n_articles,
                                              at(Category::HNLC).n_articles + at(Category::HNHC).n_articles};
  r.chi2_novelty = chi_square_gof(nov_obs, nov_size);

  const std::array<std::uint64_t, 2> conv_obs{at(Category::LNLC).n_hits + at(Category::HNLC).n_hits,
                                              at(Category::LNHC).n_hits + at(Category::HNHC).n_hits};
  const std::array<std::uint64_t, 2> conv_size{at(Category::LNLC).n_articles + at(Category::HNLC).n_articles,
                                               at(Category::LNHC).n_articles + at(Category::HNHC).n_articles};
  r.chi2_conventionality = chi_square_gof(conv_obs, conv_size);
  return r;
}

void write_hit_report_csv(std::ostream& os, const HitReport& report) {
  os << "category,n_articles,n_hits,hit_rate\n";
  for (Category c : kCategories) {
    const auto& h = report[c];
    os << to_string(c) << ',' << h.n_articles << ',' << h.n_hits << ',' << format_double(h.hit_rate) << '\n';
  }
}

namespace {

nlohmann::ordered_json test_json(const ChiSquareTest& t, std::initializer_list<std::string_view> cells) {
  nlohmann::ordered_json j;
  j["statistic"] = t.statistic;
  j["df"] = t.df;
  j["p_value"] = t.p_value;
  j["valid"] = t.valid;
  auto& per_cell = j["cells"];
  per_cell = nlohmann::ordered_json::array();
  std::size_t i = 0;
  for (auto name : cells) {
    per_cell.push_back({{"cell", name},
                        {"expected", t.expected[i]},
                        {"direction", t.direction[i] > 0 ? "over" : (t.direction[i] < 0 ? "under" : "even")}});
    ++i;
  }
  return j;
}

}  // namespace

void write_hit_tests_json(std::ostream& os, const HitReport& report, const HitConfig& cfg) {
  nlohmann::ordered_json j;
  j["hit_percentile"] = cfg.hit_percentile;
  j["tie_rule"] = "all publications tied at the cutoff are hits";
  j["total_articles"] = report.total_articles;
  j["total_hits"] = report.total_hits;
  j["chi2_4cat"] = test_json(report.chi2_4cat, {"LNLC", "LNHC", "HNLC", "HNHC"});
  j["chi2_novelty"] = test_json(report.chi2_novelty, {"LN", "HN"});
  j["chi2_conventionality"] = test_json(report.chi2_conventionality, {"LC", "HC"});
  os << j.dump(2) << '\n';
}

void print_hit_grid(std::ostream& os, const HitReport& report) {
  const auto cell = [&](Category c) {
    const auto& h = report[c];
    std::ostringstream s;
    s << std::string(to_string(c)) << ' ' << std::fixed << std::setprecision(2) << 100.0 * h.hit_rate << "% ("
      << h.n_hits << '/' << h.n_articles << ')';
    return s.str();
  };
  os << std::left << std::setw(6) << "" << std::setw(28) << "LC" << "HC" << '\n';
  os << std::setw(6) << "HN" << std::setw(28) << cell(Category::HNLC) << cell(Category::HNHC) << '\n';
  os << std::setw(6) << "LN" << std::setw(28) << cell(Category::LNLC) << cell(Category::LNHC) << '\n';
  os << std::right;
}

}  // namespace cocite
