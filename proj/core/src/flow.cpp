// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/flow.hpp"

#include <cmath>

#include "mots/error.hpp"

namespace mots {

FlowField zero_flow(int height, int width) { return FlowField(height, width); }

BinaryMask warp_mask(const BinaryMask& mask, const FlowField& flow) {
  if (mask.height != flow.height || mask.width != flow.width) {
    throw ValidationError("warp: mask and flow dimensions differ");
  }
  BinaryMask out(mask.height, mask.width);
  for (int x = 0; x < mask.width; ++x) {
    for (int y = 0; y < mask.height; ++y) {
      if (!mask.at(x, y)) continue;
      const std::size_t f = flow.index(x, y);
      const long tx = std::lround(x + flow.dx[f]);
      const long ty = std::lround(y + flow.dy[f]);
      if (tx < 0 || ty < 0 || tx >= mask.width || ty >= mask.height) continue;
      out.set(static_cast<int>(tx), static_cast<int>(ty), true);
    }
  }
  return out;
}

}  // namespace mots
