#pragma once

#include <algorithm>

namespace cocite {

template <typename Sink>
void count_journal_pairs(std::span<std::uint32_t> journals, Sink&& sink) {
  if (journals.size() < 2) return;
  std::sort(journals.begin(), journals.end());

  // Run-length encode into (journal, multiplicity); stays on the stack for typical sizes.
  constexpr std::size_t kInline = 64;
  std::uint32_t run_j_inline[kInline];
  std::uint64_t run_c_inline[kInline];
  std::vector<std::uint32_t> run_j_heap;
  std::vector<std::uint64_t> run_c_heap;
  std::uint32_t* run_j = run_j_inline;
  std::uint64_t* run_c = run_c_inline;
  if (journals.size() > kInline) {
    run_j_heap.resize(journals.size());
    run_c_heap.resize(journals.size());
    run_j = run_j_heap.data();
    run_c = run_c_heap.data();
  }

  std::size_t runs = 0;
  for (std::size_t i = 0; i < journals.size();) {
    std::size_t j = i + 1;
    while (j < journals.size() && journals[j] == journals[i]) ++j;
    run_j[runs] = journals[i];
    run_c[runs] = j - i;
    ++runs;
    i = j;
  }

  for (std::size_t x = 0; x < runs; ++x) {
    if (run_c[x] > 1) sink(pair_key(run_j[x], run_j[x]), run_c[x] * (run_c[x] - 1) / 2);
    for (std::size_t y = x + 1; y < runs; ++y) sink(pair_key(run_j[x], run_j[y]), run_c[x] * run_c[y]);
  }
}

}  // namespace cocite
