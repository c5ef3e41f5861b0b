#include "cocite/cli.hpp"

#include "config.hpp"
#include "manifest.hpp"

#include "cocite/classify.hpp"
#include "cocite/corpus.hpp"
#include "cocite/diverge.hpp"
#include "cocite/error.hpp"
#include "cocite/format.hpp"
#include "cocite/impact.hpp"
#include "cocite/pairs.hpp"
#include "cocite/shuffle.hpp"
#include "cocite/simulate.hpp"
#include "cocite/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;

namespace cocite::cli {
namespace {

struct Options {
  // inputs
  std::string pubs, refs, cites, journals;
  std::string pool_pubs, pool_refs, pool_cites;
  int slice_year = 0;  // 0: infer (ingest) / 1995 (synth)
  int min_ref_year = 1800;
  int max_ref_year = 2100;
  std::string corpus_name = "corpus";

  // simulation
  std::string background = "local";
  std::string algorithm = "repcs";
  std::size_t sims = 1000;
  std::uint64_t seed = 42;
  unsigned workers = 0;
  unsigned umsj_retries = 10;
  std::string sigma = "population";

  // analysis
  int novelty_pct = 10;
  int hit_pct = 10;
  double epsilon = 1e-12;
  std::string stage = "after";

  // synth
  std::size_t disciplines = 3;
  std::size_t journals_per_discipline = 20;
  std::string pubs_per_discipline = "1000";
  std::string ref_pool = "4000";
  double refs_mean = 12.0;
  double refs_dispersion = 4.0;
  std::size_t refs_min = 2;
  std::size_t refs_max = 80;
  double p_intra = 0.85;
  double skew = 0.6;
  int year_span = 10;

  // bench
  std::string algorithms = "repcs,umsj";

  // rerun
  std::string manifest;

  std::string out = "out";
  std::string config;
};

constexpr std::array<const char*, 7> kInputOptions{"pubs", "refs", "cites", "journals",
                                                   "pool-pubs", "pool-refs", "pool-cites"};

struct Context {
  Options opt;
  std::string command;
  CLI::App* sub = nullptr;
  std::ostream& out;
  std::ostream& err;
  fs::path out_dir;
  RunManifest manifest;
};

using Clock = std::chrono::steady_clock;

template <typename F>
auto timed(Context& ctx, const std::string& stage, F&& f) {
  const auto t0 = Clock::now();
  auto result = f();
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  ctx.manifest.timings.emplace_back(stage + "_seconds", format_double(s));
  return result;
}

void write_output(Context& ctx, const std::string& name, const std::function<void(std::ostream&)>& body) {
  fs::create_directories(ctx.out_dir);
  std::ofstream os(ctx.out_dir / name, std::ios::binary);
  if (!os) throw DataError("cannot write " + (ctx.out_dir / name).string());
  body(os);
}

void diag(Context& ctx, const std::string& key, const std::string& value) {
  ctx.manifest.diagnostics.emplace_back(key, value);
}

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  while (out.find("__") != std::string::npos) out.replace(out.find("__"), 2, "_");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

std::vector<std::size_t> parse_size_list(const std::string& s, std::size_t n, const char* what) {
  std::vector<std::size_t> values;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": '" + item + "' is not a count");
    }
  }
  if (values.size() == 1) values.assign(n, values.front());
  if (values.size() != n) {
    throw ConfigError(std::string(what) + " needs 1 or " + std::to_string(n) + " comma-separated values");
  }
  return values;
}

// --- stages -----------------------------------------------------------------

IngestConfig ingest_config(const Context& ctx, Background tag) {
  IngestConfig cfg;
  if (ctx.opt.slice_year != 0) cfg.slice_year = ctx.opt.slice_year;
  cfg.min_ref_year = ctx.opt.min_ref_year;
  cfg.max_ref_year = ctx.opt.max_ref_year;
  cfg.background = tag;
  if (!ctx.opt.journals.empty()) cfg.journal_aliases = read_journal_aliases(ctx.opt.journals);
  return cfg;
}

void record_ingest(Context& ctx, const std::string& prefix, const IngestDiagnostics& d) {
  for (const auto& [reason, n] : d.dropped) diag(ctx, prefix + ".dropped." + sanitize(reason), std::to_string(n));
  diag(ctx, prefix + ".journals_merged", std::to_string(d.journals_merged));
}

IngestResult load_corpus(Context& ctx) {
  const auto& o = ctx.opt;
  if (o.pubs.empty() || o.refs.empty() || o.cites.empty()) {
    throw ConfigError("--pubs, --refs and --cites are required");
  }
  auto result = timed(ctx, "ingest", [&] {
    return ingest({o.pubs, o.refs, o.cites}, ingest_config(ctx, Background::local));
  });
  record_ingest(ctx, "ingest", result.diagnostics);
  return result;
}

std::optional<Corpus> load_pool(Context& ctx, bool required) {
  const auto& o = ctx.opt;
  const bool given = !o.pool_pubs.empty() || !o.pool_refs.empty() || !o.pool_cites.empty();
  if (!given) {
    if (required) throw ConfigError("the global background needs --pool-pubs, --pool-refs and --pool-cites");
    return std::nullopt;
  }
  if (o.pool_pubs.empty() || o.pool_refs.empty() || o.pool_cites.empty()) {
    throw ConfigError("--pool-pubs, --pool-refs and --pool-cites must be given together");
  }
  auto result = timed(ctx, "ingest_pool", [&] {
    return ingest({o.pool_pubs, o.pool_refs, o.pool_cites}, ingest_config(ctx, Background::global));
  });
  record_ingest(ctx, "ingest_pool", result.diagnostics);
  return std::move(result.corpus);
}

SimConfig sim_config(const Context& ctx, Background background) {
  SimConfig cfg;
  cfg.n_simulations = ctx.opt.sims;
  cfg.master_seed = ctx.opt.seed;
  cfg.background = background;
  cfg.algorithm = parse_algorithm(ctx.opt.algorithm);
  cfg.workers = ctx.opt.workers;
  cfg.umsj_max_retries = ctx.opt.umsj_retries;
  if (ctx.opt.sigma == "population") cfg.sigma = SigmaMode::population;
  else if (ctx.opt.sigma == "sample") cfg.sigma = SigmaMode::sample;
  else throw ConfigError("--sigma must be 'population' or 'sample'");
  cfg.validate();
  return cfg;
}

ShuffleFrame frame_for(const Corpus& corpus, const std::optional<Corpus>& pool, Background background) {
  if (background == Background::local) return build_groups(corpus);
  if (!pool) throw ConfigError("the global background needs --pool-pubs, --pool-refs and --pool-cites");
  return build_groups(corpus, *pool);
}

SimulationResult simulate_stage(Context& ctx, const Corpus& corpus, const std::optional<Corpus>& pool,
                                Background background, const std::string& label) {
  const auto cfg = sim_config(ctx, background);
  const auto frame = frame_for(corpus, pool, background);
  auto result = timed(ctx, label, [&] { return run_simulations(frame, cfg); });
  const auto& d = result.diagnostics;
  std::size_t deleted = 0, exhausted = 0;
  for (auto v : d.deleted) deleted += v;
  for (auto v : d.retry_exhausted) exhausted += v;
  diag(ctx, label + ".pairs", std::to_string(result.moments.size()));
  diag(ctx, label + ".deleted_total", std::to_string(deleted));
  diag(ctx, label + ".deleted_per_sim", join(d.deleted));
  diag(ctx, label + ".retry_exhausted_total", std::to_string(exhausted));
  return result;
}

void write_sim_diagnostics(Context& ctx, const SimulationResult& r) {
  write_output(ctx, "sim_diagnostics.csv", [&](std::ostream& os) {
    os << "sim,deleted,fixed_points,retry_exhausted,total_pairs\n";
    const auto& d = r.diagnostics;
    for (std::size_t s = 0; s < r.n_simulations; ++s) {
      os << s << ',' << d.deleted[s] << ',' << d.fixed_points[s] << ',' << d.retry_exhausted[s] << ','
         << d.total_pairs[s] << '\n';
    }
  });
}

void write_summary(Context& ctx, const Corpus& corpus) {
  const auto s = summarize(corpus);
  write_output(ctx, "summary.csv", [&](std::ostream& os) {
    os << "year,unique_publications,unique_references,total_references,ratio\n"
       << corpus.slice_year() << ',' << s.unique_publications << ',' << s.unique_references << ','
       << s.total_references << ',' << format_double(s.ratio) << '\n';
  });
}

void write_ingest_diagnostics(Context& ctx, const IngestDiagnostics& d) {
  write_output(ctx, "ingest_diagnostics.csv", [&](std::ostream& os) {
    os << "reason,count\n";
    for (const auto& [reason, n] : d.dropped) os << reason << ',' << n << '\n';
    os << "journal ids merged," << d.journals_merged << '\n';
  });
}

struct Analysis {
  IngestResult input;
  std::optional<Corpus> pool;
  Background background = Background::local;
  JournalPairTable observed;
  SimulationResult sims;
  std::vector<PairStats> stats;
};

enum class Upto { observe, simulate, zscore };

Analysis analyze(Context& ctx, Upto upto) {
  Analysis a;
  a.background = parse_background(ctx.opt.background);
  a.input = load_corpus(ctx);
  a.pool = load_pool(ctx, a.background == Background::global && upto != Upto::observe);
  a.observed = timed(ctx, "observe", [&] { return observed_frequencies(a.input.corpus); });
  diag(ctx, "observe.pairs", std::to_string(a.observed.size()));
  diag(ctx, "observe.total_pairs", std::to_string(a.observed.total_pairs()));
  if (upto == Upto::observe) return a;
  a.sims = simulate_stage(ctx, a.input.corpus, a.pool, a.background, "simulate");
  if (upto == Upto::simulate) return a;
  a.stats = timed(ctx, "zscore", [&] { return zscores(a.observed, a.sims.moments); });
  diag(ctx, "zscore.undefined_pairs", std::to_string(count_undefined(a.stats)));
  return a;
}

Classification classify_stage(Context& ctx, const Analysis& a) {
  ClassifyConfig cfg{ctx.opt.novelty_pct};
  cfg.validate();
  return timed(ctx, "classify", [&] {
    const PairStatsIndex index(a.stats);
    auto z = corpus_zstats(a.input.corpus, index);
    diag(ctx, "classify.excluded_no_defined_pairs", std::to_string(z.excluded));
    auto c = classify_corpus(std::move(z.summaries), cfg);
    diag(ctx, "classify.threshold", format_double(c.threshold));
    return c;
  });
}

HitReport hits_stage(Context& ctx, const Analysis& a, const Classification& c) {
  HitConfig cfg{ctx.opt.hit_pct};
  cfg.validate();
  auto report = timed(ctx, "hits", [&] {
    const auto hits = designate_hits(a.input.corpus.publications(), cfg);
    diag(ctx, "hits.count", std::to_string(hits.size()));
    return hit_report(c.summaries, hits);
  });
  write_output(ctx, "hit_report.csv", [&](std::ostream& os) { write_hit_report_csv(os, report); });
  write_output(ctx, "hit_tests.json", [&](std::ostream& os) { write_hit_tests_json(os, report, cfg); });
  print_hit_grid(ctx.out, report);
  return report;
}

void write_kld_rows(Context& ctx, const Corpus& corpus, const std::vector<DivergenceResult>& rows) {
  write_output(ctx, "kld.csv", [&](std::ostream& os) {
    os << "corpus,year,background,kld,ratio\n";
    std::optional<double> local;
    for (const auto& r : rows) {
      if (r.background == Background::local) local = r.kld;
    }
    for (const auto& r : rows) {
      os << r.corpus_tag << ',' << corpus.slice_year() << ',' << to_string(r.background) << ','
         << format_double(r.kld) << ',';
      if (r.background == Background::global && local && *local > 0.0) os << format_double(r.kld / *local);
      else os << "NA";
      os << '\n';
    }
  });
}

DivergenceResult kld_stage(Context& ctx, const Corpus& corpus, const JournalPairTable& observed,
                           const SimulationResult& sims, Background background) {
  auto r = kl_divergence(observed, sims.moments, cited_journals(corpus), ctx.opt.epsilon);
  r.corpus_tag = ctx.opt.corpus_name;
  r.background = background;
  diag(ctx, "kld." + std::string(to_string(background)), format_double(r.kld));
  return r;
}

// --- commands ---------------------------------------------------------------

void cmd_ingest(Context& ctx) {
  auto in = load_corpus(ctx);
  export_tsv(in.corpus, CorpusFiles::in(ctx.out_dir));
  write_ingest_diagnostics(ctx, in.diagnostics);
  ctx.out << "ingested " << in.corpus.publications().size() << " publications, dropped "
          << in.diagnostics.total_dropped() << " rows\n";
}

void cmd_summarize(Context& ctx) {
  const auto in = load_corpus(ctx);
  write_summary(ctx, in.corpus);
  const auto s = summarize(in.corpus);
  ctx.out << "publications " << s.unique_publications << ", unique references " << s.unique_references
          << ", total references " << s.total_references << ", tr/ur " << std::fixed << std::setprecision(2)
          << s.ratio << '\n';
}

void cmd_observe(Context& ctx) {
  const auto a = analyze(ctx, Upto::observe);
  write_output(ctx, "observed_pairs.csv", [&](std::ostream& os) { write_pair_table_csv(os, a.observed); });
}

void cmd_simulate(Context& ctx) {
  const auto a = analyze(ctx, Upto::simulate);
  write_output(ctx, "simulated_pairs.csv", [&](std::ostream& os) { write_moments_csv(os, a.sims.moments); });
  write_sim_diagnostics(ctx, a.sims);
}

void cmd_zscore(Context& ctx) {
  const auto a = analyze(ctx, Upto::zscore);
  write_output(ctx, "pair_stats.csv", [&](std::ostream& os) { write_pair_stats_csv(os, a.stats); });
}

void cmd_classify(Context& ctx) {
  const auto a = analyze(ctx, Upto::zscore);
  const auto c = classify_stage(ctx, a);
  write_output(ctx, "classification.csv", [&](std::ostream& os) { write_classification_csv(os, c.summaries); });
}

void cmd_hits(Context& ctx) {
  const auto a = analyze(ctx, Upto::zscore);
  const auto c = classify_stage(ctx, a);
  hits_stage(ctx, a, c);
}

void cmd_pipeline(Context& ctx) {
  const auto a = analyze(ctx, Upto::zscore);
  write_summary(ctx, a.input.corpus);
  write_ingest_diagnostics(ctx, a.input.diagnostics);
  write_output(ctx, "observed_pairs.csv", [&](std::ostream& os) { write_pair_table_csv(os, a.observed); });
  write_output(ctx, "simulated_pairs.csv", [&](std::ostream& os) { write_moments_csv(os, a.sims.moments); });
  write_sim_diagnostics(ctx, a.sims);
  write_output(ctx, "pair_stats.csv", [&](std::ostream& os) { write_pair_stats_csv(os, a.stats); });
  const auto c = classify_stage(ctx, a);
  write_output(ctx, "classification.csv", [&](std::ostream& os) { write_classification_csv(os, c.summaries); });
  hits_stage(ctx, a, c);
  const auto k = kld_stage(ctx, a.input.corpus, a.observed, a.sims, a.background);
  write_kld_rows(ctx, a.input.corpus, {k});
}

void cmd_kld(Context& ctx) {
  const auto in = load_corpus(ctx);
  const auto pool = load_pool(ctx, true);
  const auto observed = observed_frequencies(in.corpus);
  std::vector<DivergenceResult> rows;
  for (Background bg : {Background::local, Background::global}) {
    const std::string label = "simulate_" + std::string(to_string(bg));
    const auto sims = simulate_stage(ctx, in.corpus, pool, bg, label);
    rows.push_back(kld_stage(ctx, in.corpus, observed, sims, bg));
  }
  write_kld_rows(ctx, in.corpus, rows);
  ctx.out << "K-L local " << format_double(rows[0].kld) << ", global " << format_double(rows[1].kld) << '\n';
}

void cmd_compose(Context& ctx) {
  const auto in = load_corpus(ctx);
  const auto background = parse_background(ctx.opt.background);
  const auto pool = load_pool(ctx, background == Background::global);
  const auto frame = frame_for(in.corpus, pool, background);
  const auto outcome = parse_algorithm(ctx.opt.algorithm) == Algorithm::repcs
                           ? repcs_shuffle(frame, ctx.opt.seed)
                           : umsj_shuffle(frame, ctx.opt.seed, ctx.opt.umsj_retries);
  CompositionStage stage;
  if (ctx.opt.stage == "before") stage = CompositionStage::before_correction;
  else if (ctx.opt.stage == "after") stage = CompositionStage::after_correction;
  else throw ConfigError("--stage must be 'before' or 'after'");
  const auto rows = composition_fold(in.corpus, outcome, {}, stage);
  diag(ctx, "compose.deleted", std::to_string(outcome.deleted.size()));
  write_output(ctx, "composition.csv", [&](std::ostream& os) { write_composition_csv(os, rows); });
}

SynthConfig synth_config(const Context& ctx) {
  const auto& o = ctx.opt;
  SynthConfig cfg;
  cfg.slice_year = o.slice_year != 0 ? o.slice_year : 1995;
  cfg.ref_year_span = o.year_span;
  cfg.n_disciplines = o.disciplines;
  cfg.journals_per_discipline = o.journals_per_discipline;
  cfg.pubs_per_discipline = parse_size_list(o.pubs_per_discipline, o.disciplines, "--pubs-per-discipline");
  cfg.ref_pool_per_discipline = parse_size_list(o.ref_pool, o.disciplines, "--ref-pool");
  cfg.refs_per_pub = {o.refs_mean, o.refs_dispersion, o.refs_min, o.refs_max};
  cfg.p_intra = o.p_intra;
  cfg.skew = o.skew;
  cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

void cmd_synth(Context& ctx) {
  const auto corpus = timed(ctx, "synth", [&] { return generate(synth_config(ctx)); });
  export_tsv(corpus.full, CorpusFiles::in(ctx.out_dir / "full"));
  for (std::size_t d = 0; d < corpus.disciplines.size(); ++d) {
    export_tsv(corpus.disciplines[d], CorpusFiles::in(ctx.out_dir / corpus.labels[d]));
  }
  diag(ctx, "synth.publications", std::to_string(corpus.full.publications().size()));
  diag(ctx, "synth.citations", std::to_string(corpus.full.citation_count()));
  ctx.out << "wrote " << corpus.full.publications().size() << " publications ("
          << corpus.full.citation_count() << " citations) to " << ctx.out_dir.string() << '\n';
}

void cmd_bench(Context& ctx) {
  Corpus corpus;
  if (!ctx.opt.pubs.empty()) {
    corpus = load_corpus(ctx).corpus;
  } else {
    corpus = generate(synth_config(ctx)).full;
  }
  const auto background = parse_background(ctx.opt.background);
  const auto pool = load_pool(ctx, background == Background::global);
  const auto frame = frame_for(corpus, pool, background);

  std::vector<std::string> algorithms;
  std::stringstream ss(ctx.opt.algorithms);
  for (std::string a; std::getline(ss, a, ',');) algorithms.push_back(a);

  struct Row {
    std::string algorithm;
    double shuffle_seconds;
    double total_seconds;
  };
  std::vector<Row> rows;
  for (const auto& name : algorithms) {
    Context& c = ctx;
    auto cfg = sim_config(c, background);
    cfg.algorithm = parse_algorithm(name);
    const double shuffle = time_shuffles(frame, cfg);
    const auto t0 = Clock::now();
    run_simulations(frame, cfg);
    const double total = std::chrono::duration<double>(Clock::now() - t0).count();
    rows.push_back({name, shuffle, total});
    diag(ctx, "bench." + name + ".shuffle_seconds", format_double(shuffle));
    diag(ctx, "bench." + name + ".total_seconds", format_double(total));
  }

  write_output(ctx, "bench.csv", [&](std::ostream& os) {
    os << "algorithm,citations,sims,workers,shuffle_seconds,total_seconds\n";
    for (const auto& r : rows) {
      os << r.algorithm << ',' << frame.local_citations() << ',' << ctx.opt.sims << ',' << ctx.opt.workers << ','
         << format_double(r.shuffle_seconds) << ',' << format_double(r.total_seconds) << '\n';
    }
  });
  ctx.out << "citations " << frame.local_citations() << ", simulations " << ctx.opt.sims << '\n';
  ctx.out << std::left << std::setw(10) << "algorithm" << std::setw(16) << "shuffle [s]" << "total [s]\n";
  for (const auto& r : rows) {
    ctx.out << std::setw(10) << r.algorithm << std::setw(16) << std::setprecision(4) << r.shuffle_seconds
            << r.total_seconds << '\n';
  }
}

// --- option registration -------------------------------------------------------

void add_inputs(CLI::App* s, Options& o) {
  s->add_option("--pubs", o.pubs, "publications.tsv");
  s->add_option("--refs", o.refs, "references.tsv");
  s->add_option("--cites", o.cites, "citations.tsv");
  s->add_option("--journals", o.journals, "journals.tsv alias table (raw_id, journal_key)");
  s->add_option("--slice-year", o.slice_year, "publication year to keep (default: the only year present)");
  s->add_option("--min-ref-year", o.min_ref_year, "oldest admissible reference year");
  s->add_option("--max-ref-year", o.max_ref_year, "newest admissible reference year");
  s->add_option("--name", o.corpus_name, "corpus label used in K-L output");
}

void add_pool(CLI::App* s, Options& o) {
  s->add_option("--pool-pubs", o.pool_pubs, "global background publications.tsv");
  s->add_option("--pool-refs", o.pool_refs, "global background references.tsv");
  s->add_option("--pool-cites", o.pool_cites, "global background citations.tsv");
}

void add_sim(CLI::App* s, Options& o) {
  s->add_option("--background", o.background, "local|global")->check(CLI::IsMember({"local", "global"}));
  s->add_option("--algorithm", o.algorithm, "repcs|umsj")->check(CLI::IsMember({"repcs", "umsj"}));
  s->add_option("--sims", o.sims, "number of simulations");
  s->add_option("--seed", o.seed, "master seed");
  s->add_option("--workers", o.workers, "worker threads (0: all cores)");
  s->add_option("--umsj-retries", o.umsj_retries, "umsj retries per slot");
  s->add_option("--sigma", o.sigma, "population|sample")->check(CLI::IsMember({"population", "sample"}));
}

void add_synth(CLI::App* s, Options& o) {
  s->add_option("--disciplines", o.disciplines);
  s->add_option("--journals-per-discipline", o.journals_per_discipline);
  s->add_option("--pubs-per-discipline", o.pubs_per_discipline, "one value or a comma list");
  s->add_option("--ref-pool", o.ref_pool, "references per discipline; one value or a comma list");
  s->add_option("--refs-mean", o.refs_mean);
  s->add_option("--refs-dispersion", o.refs_dispersion);
  s->add_option("--refs-min", o.refs_min);
  s->add_option("--refs-max", o.refs_max);
  s->add_option("--p-intra", o.p_intra, "probability a citation stays in its discipline");
  s->add_option("--skew", o.skew, "Zipf exponent of reference popularity");
  s->add_option("--year-span", o.year_span, "reference year window");
}

struct Command {
  const char* name;
  const char* help;
  void (*run)(Context&);
  std::function<void(CLI::App*, Options&)> options;
};

std::vector<Command> commands() {
  const auto novelty = [](CLI::App* s, Options& o) {
    s->add_option("--novelty-pct", o.novelty_pct, "10|1")->check(CLI::IsMember({10, 1}));
  };
  const auto hit = [](CLI::App* s, Options& o) {
    s->add_option("--hit-pct", o.hit_pct, "1|2|5|10")->check(CLI::IsMember({1, 2, 5, 10}));
  };
  const auto eps = [](CLI::App* s, Options& o) { s->add_option("--epsilon", o.epsilon, "K-L smoothing"); };
  return {
      {"ingest", "validate and canonicalize a corpus", cmd_ingest, add_inputs},
      {"summarize", "corpus summary counts", cmd_summarize, add_inputs},
      {"observe", "observed journal-pair frequencies", cmd_observe, add_inputs},
      {"simulate", "expected journal-pair frequencies", cmd_simulate,
       [](CLI::App* s, Options& o) { add_inputs(s, o); add_pool(s, o); add_sim(s, o); }},
      {"zscore", "journal-pair z-scores", cmd_zscore,
       [](CLI::App* s, Options& o) { add_inputs(s, o); add_pool(s, o); add_sim(s, o); }},
      {"classify", "novelty/conventionality categories", cmd_classify,
       [=](CLI::App* s, Options& o) { add_inputs(s, o); add_pool(s, o); add_sim(s, o); novelty(s, o); }},
      {"hits", "hit rates and chi-square tests", cmd_hits,
       [=](CLI::App* s, Options& o) {
         add_inputs(s, o); add_pool(s, o); add_sim(s, o); novelty(s, o); hit(s, o);
       }},
      {"kld", "K-L divergence, local vs global background", cmd_kld,
       [=](CLI::App* s, Options& o) { add_inputs(s, o); add_pool(s, o); add_sim(s, o); eps(s, o); }},
      {"compose", "subject composition fold differences of one shuffle", cmd_compose,
       [](CLI::App* s, Options& o) {
         add_inputs(s, o); add_pool(s, o); add_sim(s, o);
         s->add_option("--stage", o.stage, "before|after error correction")
             ->check(CLI::IsMember({"before", "after"}));
       }},
      {"synth", "generate a synthetic corpus", cmd_synth,
       [](CLI::App* s, Options& o) {
         add_synth(s, o);
         s->add_option("--seed", o.seed);
         s->add_option("--slice-year", o.slice_year, "publication year (default 1995)");
       }},
      {"bench", "time repcs against umsj", cmd_bench,
       [](CLI::App* s, Options& o) {
         add_inputs(s, o); add_pool(s, o); add_sim(s, o); add_synth(s, o);
         s->add_option("--algorithms", o.algorithms, "comma list");
       }},
      {"pipeline", "ingest through hit report", cmd_pipeline,
       [=](CLI::App* s, Options& o) {
         add_inputs(s, o); add_pool(s, o); add_sim(s, o); novelty(s, o); hit(s, o); eps(s, o);
       }},
  };
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  // args[0] is the subcommand; config entries go right after it so later flags win.
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    else if (args[i].starts_with("--config=")) file = args[i].substr(9);
    if (file.empty()) continue;
    std::vector<std::string> out{args[0]};
    for (auto& a : config_to_args(read_key_values(file))) out.push_back(std::move(a));
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
  }
  return args;
}

KeyValues snapshot(const CLI::App& sub) {
  KeyValues kv;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) value = opt->results().back();
    else value = opt->get_default_str();
    if (value.empty()) continue;
    kv.emplace_back(name, value);
  }
  return kv;
}

int rerun(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  if (!args.empty() && args[0] == "rerun") return rerun(args, out, err);

  CLI::App app{"Co-citation novelty and conventionality toolkit", "cocite"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options opt;
  std::vector<Command> cmds = commands();
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : cmds) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    s->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    c.options(s, opt);
    s->add_option("--out", opt.out, "output directory");
    s->add_option("--config", opt.config, "key=value config file; command-line flags win");
    subs.emplace_back(s, &c);
  }
  app.add_subcommand("rerun", "repeat a run from its run.manifest");

  if (!args.empty()) args = expand_config(args);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  for (auto& [s, c] : subs) {
    if (!s->parsed()) continue;
    Context ctx{opt, c->name, s, out, err, fs::path(opt.out), {}};
    ctx.manifest.tool_version = kToolVersion;
    ctx.manifest.command = c->name;
    ctx.manifest.config = snapshot(*s);
    for (const char* input : kInputOptions) {
      const std::string* path = nullptr;
      for (const auto& [k, v] : ctx.manifest.config) {
        if (k == input) path = &v;
      }
      if (path) ctx.manifest.digests.emplace_back(input, sha256_file(*path));
    }
    const auto t0 = Clock::now();
    c->run(ctx);
    ctx.manifest.timings.emplace_back("total_seconds",
                                      format_double(std::chrono::duration<double>(Clock::now() - t0).count()));
    fs::create_directories(ctx.out_dir);
    ctx.manifest.write(ctx.out_dir / "run.manifest");
    return 0;
  }
  return 2;
}

int rerun(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"repeat a run from its run.manifest", "cocite rerun"};
  std::string manifest_path, out_dir;
  std::optional<unsigned> workers;
  app.add_option("--manifest", manifest_path, "run.manifest to repeat")->required();
  app.add_option("--out", out_dir, "output directory for the repeated run")->required();
  app.add_option("--workers", workers, "override the worker count");
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const auto m = RunManifest::read(manifest_path);
  for (const auto& [input, digest] : m.digests) {
    for (const auto& [k, v] : m.config) {
      if (k != input) continue;
      if (sha256_file(v) != digest) throw DataError("input " + v + " changed since the manifest was written");
    }
  }
  KeyValues config;
  for (const auto& kv : m.config) {
    if (kv.first == "out" || (workers && kv.first == "workers")) continue;
    config.push_back(kv);
  }
  config.emplace_back("out", out_dir);
  if (workers) config.emplace_back("workers", std::to_string(*workers));

  std::vector<std::string> next{m.command};
  for (auto& a : config_to_args(config)) next.push_back(std::move(a));
  return dispatch(std::move(next), out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace cocite::cli
