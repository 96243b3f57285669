// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "mots/mask.hpp"

namespace mots {

// Dense forward optical flow for one frame pair. Row-major, one (dx, dy)
// pair per pixel: the pixel at (x, y) in the source frame moves to
// (x + dx, y + dy) in the target frame.
struct FlowField {
  int height = 0;
  int width = 0;
  std::vector<float> dx;
  std::vector<float> dy;

  FlowField() = default;
  FlowField(int h, int w)
      : height(h),
        width(w),
        dx(static_cast<std::size_t>(h) * w, 0.0f),
        dy(static_cast<std::size_t>(h) * w, 0.0f) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
};

FlowField zero_flow(int height, int width);

// Forward-warps a mask: each set pixel lands at its rounded flow target,
// pixels leaving the frame are dropped. Dimensions must match the flow.
BinaryMask warp_mask(const BinaryMask& mask, const FlowField& flow);

}  // namespace mots
