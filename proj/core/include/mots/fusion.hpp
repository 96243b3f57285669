// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "mots/mask.hpp"

namespace mots {

// One mask proposal from one source model. object_key identifies the
// physical observation within its frame; copies of the same object coming
// from different sources may share a key, and the fused survivor keeps it.
struct Detection {
  int frame_id = 0;
  std::int64_t object_key = 0;
  int class_id = 0;
  double score = 0.0;
  int source_id = 0;
  RleMask mask;
};

struct FusionConfig {
  // Intersection-over-smaller-mask at or above which the lower-scoring
  // proposal is suppressed.
  double iom_threshold = 0.5;
};

// Greedy suppression over one frame's proposals: highest score wins, ties
// broken by source id then input order. Output keeps selection order, so
// scores are non-increasing.
std::vector<Detection> nms_iom(const std::vector<Detection>& frame_detections,
                               const FusionConfig& config);

// Makes the surviving masks of one frame pairwise disjoint: every contested
// pixel goes to the highest-scoring owner (same tie-break as selection).
// Masks emptied by the carve are dropped.
std::vector<Detection> resolve_overlaps(std::vector<Detection> survivors);

// Full per-frame fusion over a mixed-source detection set. Frames are
// processed independently; output is sorted by (frame, selection order).
std::vector<Detection> fuse_detections(const std::vector<Detection>& detections,
                                       const FusionConfig& config);

}  // namespace mots
