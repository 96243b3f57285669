// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "mots/embedding.hpp"
#include "mots/merging.hpp"
#include "mots/rng.hpp"
#include "mots/tracklet.hpp"

namespace {

struct MergeFixture {
  std::vector<mots::Tracklet> tracklets;
  mots::EmbeddingStore store;
};

// Fragmented video: `tracks` identities, each broken into `pieces` tracklets
// separated by small gaps, with noisy per-observation embeddings.
MergeFixture make_fixture(int tracks, int pieces, std::uint64_t seed) {
  mots::Rng rng(seed);
  const int dim = 16;
  MergeFixture f;
  std::vector<std::vector<float>> means;
  for (int t = 0; t < tracks; ++t) {
    std::vector<float> m(dim);
    for (auto& v : m) v = static_cast<float>(rng.normal(0.0, 1.0));
    means.push_back(m);
  }
  int next_id = 1;
  for (int t = 0; t < tracks; ++t) {
    int frame = 1;
    for (int p = 0; p < pieces; ++p) {
      mots::Tracklet piece;
      piece.id = next_id++;
      piece.class_id = 2;
      const int len = 5 + static_cast<int>(rng.uniform_int(0, 5));
      for (int k = 0; k < len; ++k, ++frame) {
        const std::int64_t key = t * 1000 + frame;
        piece.observations.push_back({frame, key});
        auto e = means[static_cast<std::size_t>(t)];
        for (auto& v : e) v = static_cast<float>(v + rng.normal(0.0, 0.05));
        f.store.insert(frame, key, std::move(e));
      }
      frame += 2 + static_cast<int>(rng.uniform_int(0, 3));  // gap under theta_t
      f.tracklets.push_back(std::move(piece));
    }
  }
  return f;
}

void BM_BuildLongMatrix(benchmark::State& state) {
  const auto f = make_fixture(static_cast<int>(state.range(0)), 6, 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mots::build_long_matrix(f.tracklets, 15, f.store));
  }
}
BENCHMARK(BM_BuildLongMatrix)->Arg(4)->Arg(10)->Arg(20);

void BM_ClusterTracklets(benchmark::State& state) {
  const auto f = make_fixture(static_cast<int>(state.range(0)), 6, 17);
  const auto matrix = mots::build_long_matrix(f.tracklets, 15, f.store);
  mots::ClusterOptions options;
  options.cut = 0.4;
  options.theta_t = 15;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mots::cluster_tracklets(matrix, f.tracklets, f.store, options));
  }
}
BENCHMARK(BM_ClusterTracklets)->Arg(4)->Arg(10)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
