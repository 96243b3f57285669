// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "mots/error.hpp"
#include "mots/flow.hpp"
#include "mots/mask.hpp"
#include "mots/rng.hpp"
#include "support/oracles.hpp"

using namespace mots;

namespace {

struct GoldenCase {
  std::string name;
  int height = 0;
  int width = 0;
  std::string pixels;  // column-major 0/1 characters
  std::string counts;
};

// Four lines per case: "case <name>", "h w", pixels, expected counts.
// An empty pixel line is impossible (h*w >= 1), so blanks separate nothing.
std::vector<GoldenCase> load_golden() {
  std::ifstream in(std::string(MOTSREF_TEST_DATA_DIR) + "/rle_golden.txt");
  REQUIRE(in.is_open());
  std::vector<GoldenCase> cases;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    REQUIRE(line.rfind("case ", 0) == 0);
    GoldenCase g;
    g.name = line.substr(5);
    REQUIRE(static_cast<bool>(std::getline(in, line)));
    std::istringstream dims(line);
    REQUIRE(static_cast<bool>(dims >> g.height >> g.width));
    REQUIRE(static_cast<bool>(std::getline(in, g.pixels)));
    REQUIRE(static_cast<bool>(std::getline(in, g.counts)));
    cases.push_back(std::move(g));
  }
  REQUIRE(cases.size() >= 20);
  return cases;
}

BinaryMask mask_from_pixels(int height, int width, const std::string& pixels) {
  REQUIRE(static_cast<std::size_t>(height) * width == pixels.size());
  BinaryMask m(height, width);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    m.bits[i] = pixels[i] == '1' ? 1 : 0;
  }
  return m;
}

BinaryMask random_mask(Rng& rng, int height, int width, double density) {
  BinaryMask m(height, width);
  for (auto& b : m.bits) b = rng.uniform01() < density ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("golden encodings match the pinned reference strings") {
  for (const auto& g : load_golden()) {
    CAPTURE(g.name);
    const auto mask = mask_from_pixels(g.height, g.width, g.pixels);
    const auto rle = encode_rle(mask);
    CHECK(rle.counts == g.counts);
    CHECK(decode_rle({g.height, g.width, g.counts}) == mask);
  }
}

TEST_CASE("round trip is identity over random masks of many shapes") {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const int h = static_cast<int>(rng.uniform_int(1, 32));
    const int w = static_cast<int>(rng.uniform_int(1, 32));
    const double density = rng.uniform01();
    const auto mask = random_mask(rng, h, w, density);
    const auto rle = encode_rle(mask);
    REQUIRE(decode_rle(rle) == mask);
    REQUIRE(rle_area(rle) == mask_area(mask));
  }
}

TEST_CASE("encoding is canonical: no zero runs except a leading one") {
  Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    const auto mask = random_mask(rng, 9, 7, 0.5);
    const auto runs = rle_run_counts(encode_rle(mask));
    for (std::size_t r = 1; r < runs.size(); ++r) {
      CAPTURE(i);
      CHECK(runs[r] > 0);
    }
    // Trailing background is folded into the last run, never appended.
    if (runs.size() > 1) CHECK(runs.back() > 0);
  }
}

TEST_CASE("run deltas reconstruct long alternating patterns") {
  // Alternating columns produce many runs, exercising the delta encoding
  // of every run index beyond the second.
  BinaryMask m(6, 40);
  for (int x = 0; x < m.width; x += 2) {
    for (int y = 0; y < m.height; ++y) m.set(x, y, 1);
  }
  const auto rle = encode_rle(m);
  const auto runs = rle_run_counts(rle);
  REQUIRE(runs.size() == 41);  // leading background 0 plus 40 alternating runs
  CHECK(runs[0] == 0);
  for (std::size_t r = 1; r < runs.size(); ++r) CHECK(runs[r] == 6);
  CHECK(decode_rle(rle) == m);
}

TEST_CASE("malformed strings are rejected with the byte offset") {
  SUBCASE("character outside the alphabet") {
    CHECK_THROWS_WITH_AS(rle_run_counts({2, 2, "0\x20"}), doctest::Contains("invalid character"),
                         ValidationError);
  }
  SUBCASE("truncated continuation") {
    // 'o' (0x6F) has the continuation bit set and nothing follows.
    CHECK_THROWS_WITH_AS(rle_run_counts({2, 2, "o"}), doctest::Contains("truncated"),
                         ValidationError);
  }
  SUBCASE("negative run length") {
    // '@' ends a varint with the sign bit set, decoding to -16.
    CHECK_THROWS_WITH_AS(rle_run_counts({2, 2, "@"}), doctest::Contains("negative run"),
                         ValidationError);
  }
  SUBCASE("run sum shorter than the canvas") {
    CHECK_THROWS_AS(decode_rle({4, 4, "01"}), ValidationError);
  }
  SUBCASE("run sum longer than the canvas") {
    CHECK_THROWS_AS(decode_rle({1, 1, "04"}), ValidationError);
  }
}

TEST_CASE("area from the counts string never touches pixels") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto mask = random_mask(rng, 16, 16, 0.3);
    CHECK(rle_area(encode_rle(mask)) == mask_area(mask));
  }
  CHECK(rle_area(encode_rle(BinaryMask(8, 8))) == 0);
}

TEST_CASE("overlap ratios agree with pixel counting") {
  Rng rng(77);
  for (int i = 0; i < 60; ++i) {
    const auto a = random_mask(rng, 12, 12, 0.4);
    auto b = a;
    // Perturb so the pair ranges from near-identical to unrelated.
    const int flips = static_cast<int>(rng.uniform_int(0, 100));
    for (int f = 0; f < flips; ++f) {
      const auto x = static_cast<int>(rng.uniform_int(0, 11));
      const auto y = static_cast<int>(rng.uniform_int(0, 11));
      b.set(x, y, static_cast<std::uint8_t>(1 - b.at(x, y)));
    }
    CHECK(mask_iou(a, b) == doctest::Approx(testsupport::pixel_iou(a, b)).epsilon(1e-12));
    if (mask_area(a) > 0 || mask_area(b) > 0) {
      CHECK(mask_iom(a, b) == doctest::Approx(testsupport::pixel_iom(a, b)).epsilon(1e-12));
      CHECK(mask_iou(a, b) <= mask_iom(a, b) + 1e-15);
    }
  }
}

TEST_CASE("overlap ratio edge cases") {
  const BinaryMask empty(4, 4);
  BinaryMask full(4, 4);
  for (auto& b : full.bits) b = 1;

  CHECK(mask_iou(empty, empty) == 0.0);
  CHECK(mask_iou(full, full) == 1.0);
  CHECK(mask_iom(full, empty) == 0.0);
  CHECK_THROWS_AS(mask_iom(empty, empty), ValidationError);
  CHECK_THROWS_AS(mask_iou(BinaryMask(2, 3), BinaryMask(3, 2)), ValidationError);
  CHECK_THROWS_AS(mask_iom(BinaryMask(2, 3), BinaryMask(3, 2)), ValidationError);
}

TEST_CASE("flow warp translates masks and clips at the border") {
  BinaryMask m(8, 8);
  m.set(2, 3, 1);
  m.set(3, 3, 1);

  SUBCASE("uniform integer translation") {
    FlowField flow(8, 8);
    for (auto& d : flow.dx) d = 2.0f;
    for (auto& d : flow.dy) d = -1.0f;
    const auto warped = warp_mask(m, flow);
    BinaryMask expect(8, 8);
    expect.set(4, 2, 1);
    expect.set(5, 2, 1);
    CHECK(warped == expect);
  }

  SUBCASE("pixels leaving the canvas are dropped") {
    FlowField flow(8, 8);
    for (auto& d : flow.dx) d = 100.0f;
    const auto warped = warp_mask(m, flow);
    CHECK(mask_area(warped) == 0);
  }

  SUBCASE("the summed target coordinate rounds, halves away from zero") {
    FlowField flow(8, 8);
    for (auto& d : flow.dx) d = 0.5f;
    for (auto& d : flow.dy) d = -0.5f;
    const auto warped = warp_mask(m, flow);
    // x: 2.5 and 3.5 round up; y: 3 - 0.5 = 2.5 also rounds up, back to 3.
    BinaryMask expect(8, 8);
    expect.set(3, 3, 1);
    expect.set(4, 3, 1);
    CHECK(warped == expect);
  }

  SUBCASE("zero flow is identity") {
    CHECK(warp_mask(m, zero_flow(8, 8)) == m);
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(warp_mask(m, zero_flow(4, 4)), ValidationError);
  }
}
