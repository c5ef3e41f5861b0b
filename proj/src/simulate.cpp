#include "cocite/simulate.hpp"

#include "cocite/error.hpp"
#include "cocite/format.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace cocite {

std::string_view to_string(Algorithm a) { return a == Algorithm::repcs ? "repcs" : "umsj"; }

Algorithm parse_algorithm(std::string_view s) {
  if (s == "repcs") return Algorithm::repcs;
  if (s == "umsj") return Algorithm::umsj;
  throw ConfigError("algorithm must be 'repcs' or 'umsj', got '" + std::string(s) + "'");
}

void SimConfig::validate() const {
  if (n_simulations < 2) throw ConfigError("n_simulations must be >= 2");
  if (n_simulations > 0xFFFF'FFFFull) throw ConfigError("n_simulations must fit in 32 bits");
}

namespace {

__extension__ using u128 = unsigned __int128;

using Clock = std::chrono::steady_clock;

unsigned resolve_workers(unsigned requested, std::size_t jobs) {
  unsigned w = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (jobs < w) w = static_cast<unsigned>(std::max<std::size_t>(1, jobs));
  return w;
}

// Runs body(worker, sim) for every sim on `workers` threads; rethrows the first failure.
template <typename Body>
void parallel_sims(unsigned workers, std::size_t n_sims, Body&& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto loop = [&](unsigned worker) {
    try {
      for (std::size_t s = next++; s < n_sims; s = next++) body(worker, s);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n_sims;
    }
  };
  if (workers == 1) {
    loop(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(loop, w);
  }
  if (failure) std::rethrow_exception(failure);
}

// Triangular dense cell index for a <= b.
inline std::size_t tri(std::uint32_t a, std::uint32_t b) {
  return static_cast<std::size_t>(b) * (b + 1) / 2 + a;
}

constexpr std::size_t kDenseCellLimit = std::size_t{1} << 20;

struct DenseCounter {
  explicit DenseCounter(std::size_t cells)
      : counts(cells, 0), sum(cells, 0), sum_sq(cells, 0), track(cells > kScanAllLimit) {}

  void add(PairKey k, std::uint64_t c) {
    const std::size_t idx = tri(key_first(k), key_second(k));
    if (track && counts[idx] == 0) touched.push_back(static_cast<std::uint32_t>(idx));
    counts[idx] += c;
  }

  std::uint64_t end_simulation() {
    std::uint64_t total = 0;
    const auto flush = [&](std::size_t idx) {
      const std::uint64_t c = counts[idx];
      sum[idx] += c;
      sum_sq[idx] += c * c;
      total += c;
      counts[idx] = 0;
    };
    if (track) {
      for (std::uint32_t idx : touched) flush(idx);
      touched.clear();
    } else {
      for (std::size_t idx = 0; idx < counts.size(); ++idx) flush(idx);
    }
    return total;
  }

  // Small tables are scanned whole at the end of a simulation; large ones track touched cells.
  static constexpr std::size_t kScanAllLimit = std::size_t{1} << 16;

  std::vector<std::uint64_t> counts;
  std::vector<std::uint32_t> touched;
  std::vector<std::uint64_t> sum;
  std::vector<std::uint64_t> sum_sq;
  bool track;
};

struct SparseCounter {
  void add(PairKey k, std::uint64_t c) { counts[k] += c; }

  std::uint64_t end_simulation() {
    std::uint64_t total = 0;
    for (const auto& [k, c] : counts) {
      auto& m = acc[k];
      m.sum += c;
      m.sum_sq += c * c;
      total += c;
    }
    counts.clear();
    return total;
  }

  std::unordered_map<PairKey, std::uint64_t> counts;
  std::unordered_map<PairKey, FrequencySums> acc;
};


template <typename Counter>
SimulationResult simulate_with(const ShuffleFrame& frame, const SimConfig& cfg,
                               const std::vector<std::uint32_t>& ref_journal,
                               const std::function<Counter()>& make_counter,
                               const std::function<void(std::vector<Counter>&, MomentTable&)>& reduce) {
  const std::size_t n = cfg.n_simulations;
  const unsigned workers = resolve_workers(cfg.workers, n);

  SimulationResult result;
  result.n_simulations = n;
  auto& diag = result.diagnostics;
  diag.deleted.assign(n, 0);
  diag.fixed_points.assign(n, 0);
  diag.retry_exhausted.assign(n, 0);
  diag.total_pairs.assign(n, 0);

  std::vector<Counter> counters;
  std::vector<ShuffleWorkspace> spaces;
  counters.reserve(workers);
  spaces.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    counters.push_back(make_counter());
    spaces.emplace_back(frame);
  }
  std::vector<double> shuffle_time(workers, 0.0), count_time(workers, 0.0);
  std::vector<std::vector<std::uint32_t>> buffers(workers);

  parallel_sims(workers, n, [&](unsigned w, std::size_t s) {
    auto& ws = spaces[w];
    auto& counter = counters[w];
    auto& buf = buffers[w];
    const auto t0 = Clock::now();
    const auto sim = static_cast<std::uint32_t>(s);
    const ShuffleStats stats = cfg.algorithm == Algorithm::repcs
                                   ? ws.run_repcs(cfg.master_seed, sim)
                                   : ws.run_umsj(cfg.master_seed, sim, cfg.umsj_max_retries);
    const auto t1 = Clock::now();
    for (std::size_t p = 0; p < ws.n_local_pubs(); ++p) {
      if (ws.deleted(p)) continue;
      const auto refs = ws.refs(p);
      buf.resize(refs.size());
      for (std::size_t i = 0; i < refs.size(); ++i) buf[i] = ref_journal[refs[i]];
      count_journal_pairs(std::span(buf), [&](PairKey k, std::uint64_t c) { counter.add(k, c); });
    }
    diag.total_pairs[s] = counter.end_simulation();
    const auto t2 = Clock::now();
    diag.deleted[s] = stats.deleted;
    diag.fixed_points[s] = stats.fixed_points;
    diag.retry_exhausted[s] = stats.retry_exhausted;
    shuffle_time[w] += std::chrono::duration<double>(t1 - t0).count();
    count_time[w] += std::chrono::duration<double>(t2 - t1).count();
  });

  for (unsigned w = 0; w < workers; ++w) {
    diag.shuffle_seconds += shuffle_time[w];
    diag.count_seconds += count_time[w];
  }
  reduce(counters, result.moments);
  return result;
}

}  // namespace

PairMoments moments_of(const FrequencySums& m, std::size_t n, SigmaMode mode) {
  const auto N = static_cast<u128>(n);
  const auto s = static_cast<u128>(m.sum);
  const u128 numer = N * m.sum_sq - s * s;  // >= 0 (Cauchy-Schwarz), exact
  const double denom = mode == SigmaMode::population ? static_cast<double>(n) * static_cast<double>(n)
                                                     : static_cast<double>(n) * static_cast<double>(n - 1);
  return {static_cast<double>(m.sum) / static_cast<double>(n),
          std::sqrt(static_cast<double>(numer) / denom)};
}

SimulationResult run_simulations(const ShuffleFrame& frame, const SimConfig& cfg) {
  cfg.validate();

  std::vector<std::string> ids;
  ids.reserve(frame.references.size());
  for (const auto& r : frame.references) ids.push_back(r.journal_id);
  const JournalDictionary dict(std::move(ids));
  std::vector<std::uint32_t> ref_journal;
  ref_journal.reserve(frame.references.size());
  for (const auto& r : frame.references) ref_journal.push_back(dict.index(r.journal_id));

  const std::size_t n = cfg.n_simulations;
  const std::size_t J = dict.size();
  const std::size_t cells = J * (J + 1) / 2;

  if (cells <= kDenseCellLimit) {
    return simulate_with<DenseCounter>(
        frame, cfg, ref_journal, [cells] { return DenseCounter(cells); },
        [&](std::vector<DenseCounter>& counters, MomentTable& out) {
          for (std::uint32_t b = 0, idx = 0; b < J; ++b) {
            for (std::uint32_t a = 0; a <= b; ++a, ++idx) {
              FrequencySums m;
              for (const auto& c : counters) {
                m.sum += c.sum[idx];
                m.sum_sq += c.sum_sq[idx];
              }
              if (m.sum == 0) continue;
              out.emplace_hint(out.end(), JournalPair(dict.id(a), dict.id(b)), moments_of(m, n, cfg.sigma));
            }
          }
        });
  }
  return simulate_with<SparseCounter>(
      frame, cfg, ref_journal, [] { return SparseCounter(); },
      [&](std::vector<SparseCounter>& counters, MomentTable& out) {
        std::unordered_map<PairKey, FrequencySums> total;
        for (auto& c : counters) {
          for (const auto& [k, m] : c.acc) {
            auto& t = total[k];
            t.sum += m.sum;
            t.sum_sq += m.sum_sq;
          }
          c.acc.clear();
        }
        for (const auto& [k, m] : total) {
          out.emplace(JournalPair(dict.id(key_first(k)), dict.id(key_second(k))), moments_of(m, n, cfg.sigma));
        }
      });
}

SimulationResult run_simulations(const Corpus& corpus, const Corpus& pool, const SimConfig& cfg) {
  const ShuffleFrame frame = cfg.background == Background::local ? build_groups(corpus) : build_groups(corpus, pool);
  return run_simulations(frame, cfg);
}

double time_shuffles(const ShuffleFrame& frame, const SimConfig& cfg) {
  const unsigned workers = resolve_workers(cfg.workers, cfg.n_simulations);
  std::vector<ShuffleWorkspace> spaces;
  spaces.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) spaces.emplace_back(frame);

  const auto t0 = Clock::now();
  parallel_sims(workers, cfg.n_simulations, [&](unsigned w, std::size_t s) {
    const auto sim = static_cast<std::uint32_t>(s);
    if (cfg.algorithm == Algorithm::repcs) {
      spaces[w].run_repcs(cfg.master_seed, sim);
    } else {
      spaces[w].run_umsj(cfg.master_seed, sim, cfg.umsj_max_retries);
    }
  });
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<PairStats> zscores(const JournalPairTable& observed, const MomentTable& simulated) {
  std::vector<PairStats> out;
  out.reserve(std::max(observed.size(), simulated.size()));

  const auto emit = [&](const JournalPair& pair, std::uint64_t f_obs, const PairMoments& m) {
    PairStats s{pair, f_obs, m.mean, m.sigma, std::nullopt};
    if (m.sigma > 0.0) s.z = (static_cast<double>(f_obs) - m.mean) / m.sigma;
    out.push_back(std::move(s));
  };

  auto o = observed.begin();
  auto e = simulated.begin();
  while (o != observed.end() || e != simulated.end()) {
    if (e == simulated.end() || (o != observed.end() && o->first < e->first)) {
      emit(o->first, o->second, PairMoments{});
      ++o;
    } else if (o == observed.end() || e->first < o->first) {
      emit(e->first, 0, e->second);
      ++e;
    } else {
      emit(o->first, o->second, e->second);
      ++o;
      ++e;
    }
  }
  return out;
}

std::size_t count_undefined(const std::vector<PairStats>& stats) {
  std::size_t n = 0;
  for (const auto& s : stats) n += s.defined() ? 0 : 1;
  return n;
}

SignChangeReport sign_change_report(const std::vector<PairStats>& a, const std::vector<PairStats>& b) {
  std::map<JournalPair, double> zb;
  for (const auto& s : b) {
    if (s.z) zb.emplace(s.pair, *s.z);
  }
  SignChangeReport rep;
  for (const auto& s : a) {
    if (!s.z) continue;
    const auto it = zb.find(s.pair);
    if (it == zb.end()) continue;
    ++rep.common_defined;
    if ((*s.z > 0 && it->second < 0) || (*s.z < 0 && it->second > 0)) ++rep.changed;
  }
  rep.fraction = rep.common_defined == 0
                     ? 0.0
                     : static_cast<double>(rep.changed) / static_cast<double>(rep.common_defined);
  return rep;
}

void write_moments_csv(std::ostream& os, const MomentTable& moments) {
  os << "journal_a,journal_b,mean,sigma\n";
  for (const auto& [pair, m] : moments) {
    os << pair.a() << ',' << pair.b() << ',' << format_double(m.mean) << ',' << format_double(m.sigma) << '\n';
  }
}

void write_pair_stats_csv(std::ostream& os, const std::vector<PairStats>& stats) {
  os << "journal_a,journal_b,f_obs,f_exp,sigma,z,defined_flag\n";
  for (const auto& s : stats) {
    os << s.pair.a() << ',' << s.pair.b() << ',' << s.f_obs << ',' << format_double(s.f_exp) << ','
       << format_double(s.sigma) << ',' << format_optional(s.z) << ',' << (s.defined() ? 1 : 0) << '\n';
  }
}

}  // namespace cocite
