// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "mots/assignment.hpp"
#include "mots/rng.hpp"

namespace {

// Realistic tracking matrix: mostly infeasible, a handful of candidates per
// row near the diagonal.
mots::CostMatrix make_sparse_matrix(std::size_t n, std::uint64_t seed) {
  mots::Rng rng(seed);
  mots::CostMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r >= 3 ? r - 3 : 0; c < std::min(n, r + 4); ++c) {
      m.at(r, c) = rng.uniform01();
    }
  }
  return m;
}

mots::CostMatrix make_dense_matrix(std::size_t n, std::uint64_t seed) {
  mots::Rng rng(seed);
  mots::CostMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m.at(r, c) = rng.uniform01();
  }
  return m;
}

void BM_MatchSparse(benchmark::State& state) {
  const auto m = make_sparse_matrix(static_cast<std::size_t>(state.range(0)), 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mots::min_cost_matching(m));
  }
}
BENCHMARK(BM_MatchSparse)->Arg(16)->Arg(64)->Arg(256);

void BM_MatchDense(benchmark::State& state) {
  const auto m = make_dense_matrix(static_cast<std::size_t>(state.range(0)), 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mots::min_cost_matching(m));
  }
}
BENCHMARK(BM_MatchDense)->Arg(16)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
