// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/mask.hpp"

#include <algorithm>
#include <cstdint>

#include "mots/error.hpp"

namespace mots {
namespace {

// Compressed counts string: each character carries 5 data bits plus a
// continuation bit (0x20), offset by 48, so the alphabet is ASCII 48..111.
// Counts from the fourth one onward are stored as the signed difference to
// the count two positions back; bit 0x10 of the final character signals
// sign extension.
constexpr int kCharOffset = 48;
constexpr int kCharMax = 111;

std::string to_offset_message(const char* what, std::size_t byte_offset) {
  return std::string(what) + " at byte " + std::to_string(byte_offset);
}

std::vector<std::int64_t> parse_counts(const std::string& s) {
  std::vector<std::int64_t> counts;
  std::size_t p = 0;
  while (p < s.size()) {
    const std::size_t start = p;
    std::int64_t x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= s.size()) {
        throw ValidationError(to_offset_message("rle decode error: truncated varint", start));
      }
      const unsigned char raw = static_cast<unsigned char>(s[p]);
      if (raw < kCharOffset || raw > kCharMax) {
        throw ValidationError(to_offset_message("rle decode error: invalid character", p));
      }
      const std::int64_t c = raw - kCharOffset;
      x |= (c & 0x1F) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (!more && (c & 0x10)) {
        x |= -(std::int64_t{1} << (5 * k));
      }
    }
    if (counts.size() > 2) {
      x += counts[counts.size() - 2];
    }
    if (x < 0) {
      throw ValidationError(to_offset_message("rle decode error: negative run", start));
    }
    counts.push_back(x);
  }
  return counts;
}

}  // namespace

std::int64_t mask_area(const BinaryMask& mask) {
  std::int64_t area = 0;
  for (auto b : mask.bits) area += b;
  return area;
}

std::vector<std::int64_t> rle_run_counts(const RleMask& rle) {
  return parse_counts(rle.counts);
}

std::int64_t rle_area(const RleMask& rle) {
  const auto counts = parse_counts(rle.counts);
  std::int64_t area = 0;
  for (std::size_t i = 1; i < counts.size(); i += 2) area += counts[i];
  return area;
}

BinaryMask decode_rle(const RleMask& rle) {
  if (rle.height <= 0 || rle.width <= 0) {
    throw ValidationError("rle decode error: non-positive dimensions");
  }
  const auto counts = parse_counts(rle.counts);

  BinaryMask mask(rle.height, rle.width);
  const std::int64_t total = static_cast<std::int64_t>(rle.height) * rle.width;
  std::int64_t pos = 0;
  std::uint8_t value = 0;
  for (const auto run : counts) {
    if (pos + run > total) {
      throw ValidationError(to_offset_message(
          "rle decode error: run-sum exceeds mask size", rle.counts.size()));
    }
    if (value) {
      std::fill(mask.bits.begin() + pos, mask.bits.begin() + pos + run, std::uint8_t{1});
    }
    pos += run;
    value ^= 1;
  }
  if (pos != total) {
    throw ValidationError(to_offset_message(
        "rle decode error: run-sum mismatch", rle.counts.size()));
  }
  return mask;
}

RleMask encode_rle(const BinaryMask& mask) {
  std::vector<std::int64_t> counts;
  std::uint8_t value = 0;
  std::int64_t run = 0;
  for (const auto b : mask.bits) {
    if (b == value) {
      ++run;
    } else {
      counts.push_back(run);
      value = b;
      run = 1;
    }
  }
  counts.push_back(run);

  std::string s;
  s.reserve(counts.size() * 2);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::int64_t x = counts[i];
    if (i > 2) x -= counts[i - 2];
    bool more = true;
    while (more) {
      const std::int64_t c = x & 0x1F;
      x >>= 5;  // arithmetic shift, keeps the sign fill
      more = (c & 0x10) ? (x != -1) : (x != 0);
      s.push_back(static_cast<char>((more ? (c | 0x20) : c) + kCharOffset));
    }
  }
  return RleMask{mask.height, mask.width, std::move(s)};
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.height != b.height || a.width != b.width) {
    throw ValidationError("iou: mask dimension mismatch");
  }
  std::int64_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    inter += a.bits[i] & b.bits[i];
    uni += a.bits[i] | b.bits[i];
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double mask_iom(const BinaryMask& a, const BinaryMask& b) {
  if (a.height != b.height || a.width != b.width) {
    throw ValidationError("iom: mask dimension mismatch");
  }
  std::int64_t inter = 0, area_a = 0, area_b = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    inter += a.bits[i] & b.bits[i];
    area_a += a.bits[i];
    area_b += b.bits[i];
  }
  const std::int64_t smaller = std::min(area_a, area_b);
  if (smaller == 0) {
    if (area_a == 0 && area_b == 0) {
      throw ValidationError("iom: undefined for two empty masks");
    }
    return 0.0;
  }
  return static_cast<double>(inter) / static_cast<double>(smaller);
}

}  // namespace mots
