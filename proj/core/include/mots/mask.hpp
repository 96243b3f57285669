// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mots {

// Dense binary mask. Pixels are stored column-major (index = x*height + y)
// to match the run order of the compressed RLE format.
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;  // size == height * width, values 0/1

  BinaryMask() = default;
  BinaryMask(int h, int w) : height(h), width(w), bits(static_cast<std::size_t>(h) * w, 0) {}

  std::uint8_t at(int x, int y) const {
    return bits[static_cast<std::size_t>(x) * height + y];
  }
  void set(int x, int y, std::uint8_t v) {
    bits[static_cast<std::size_t>(x) * height + y] = v;
  }

  bool operator==(const BinaryMask&) const = default;
};

// Run-length encoded mask in the MOTSChallenge text convention: column-major
// runs, first run counts background pixels, counts packed into the
// 6-bit-per-character string alphabet (ASCII 48..111).
struct RleMask {
  int height = 0;
  int width = 0;
  std::string counts;

  bool operator==(const RleMask&) const = default;
};

// Number of foreground pixels.
std::int64_t mask_area(const BinaryMask& mask);

// Unpacked run lengths (background first). Throws ValidationError naming
// the byte offset on malformed characters, truncated varints, or a
// negative run.
std::vector<std::int64_t> rle_run_counts(const RleMask& rle);

// Foreground pixel count straight from the counts string, no dense decode.
std::int64_t rle_area(const RleMask& rle);

// Decode a compressed counts string to a dense mask. Beyond rle_run_counts
// errors, throws ValidationError when the run sum does not cover
// height*width pixels.
BinaryMask decode_rle(const RleMask& rle);

// Encode a dense mask to its canonical compressed string (column-major,
// leading background run, minimal run list).
RleMask encode_rle(const BinaryMask& mask);

// Intersection over union. Returns 0 when both masks are empty.
// Throws ValidationError on dimension mismatch.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

// Intersection over minimum area: |a∩b| / min(|a|,|b|).
// Throws ValidationError on dimension mismatch or when both masks are
// empty (the ratio is undefined; callers must filter empty masks first).
double mask_iom(const BinaryMask& a, const BinaryMask& b);

}  // namespace mots
