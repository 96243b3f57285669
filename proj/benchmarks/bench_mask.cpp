// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "mots/mask.hpp"
#include "mots/rng.hpp"

namespace {

// Blobby mask with long runs, the texture the codec sees in practice.
mots::BinaryMask make_blob_mask(int height, int width, std::uint64_t seed) {
  mots::Rng rng(seed);
  mots::BinaryMask m(height, width);
  for (int blob = 0; blob < 12; ++blob) {
    const auto cx = rng.uniform_int(0, width - 1);
    const auto cy = rng.uniform_int(0, height - 1);
    const auto r = rng.uniform_int(8, height / 4);
    for (int x = 0; x < width; ++x) {
      for (int y = 0; y < height; ++y) {
        const auto dx = x - cx;
        const auto dy = y - cy;
        if (dx * dx + dy * dy <= r * r) m.set(x, y, 1);
      }
    }
  }
  return m;
}

void BM_EncodeRle(benchmark::State& state) {
  const auto mask = make_blob_mask(480, 640, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mots::encode_rle(mask));
  }
}
BENCHMARK(BM_EncodeRle);

void BM_DecodeRle(benchmark::State& state) {
  const auto rle = mots::encode_rle(make_blob_mask(480, 640, 7));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mots::decode_rle(rle));
  }
}
BENCHMARK(BM_DecodeRle);

void BM_MaskIou(benchmark::State& state) {
  const auto a = make_blob_mask(480, 640, 7);
  const auto b = make_blob_mask(480, 640, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mots::mask_iou(a, b));
  }
}
BENCHMARK(BM_MaskIou);

void BM_RleArea(benchmark::State& state) {
  const auto rle = mots::encode_rle(make_blob_mask(480, 640, 7));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mots::rle_area(rle));
  }
}
BENCHMARK(BM_RleArea);

}  // namespace

BENCHMARK_MAIN();
