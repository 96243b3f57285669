// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "mots/assignment.hpp"
#include "mots/embedding.hpp"
#include "mots/flow.hpp"
#include "mots/fusion.hpp"
#include "mots/tracklet.hpp"

namespace mots {

// Distance matrix between two adjacent frames' observations.
// entry(i, j) = kInfeasible when the warped previous mask does not touch the
// current mask at all, or when appearance distance 1 - cos exceeds
// 1 - theta_short; otherwise 1 - cos, in [0, 2].
CostMatrix build_short_matrix(const std::vector<Detection>& prev,
                              const std::vector<Detection>& curr,
                              const FlowField& flow,
                              const EmbeddingStore& store,
                              double theta_short);

// Minimum-total-distance one-to-one matching over feasible entries; rows and
// columns with no feasible entry stay unmatched.
std::vector<std::pair<std::size_t, std::size_t>> solve_assignment(const CostMatrix& matrix);

struct ShortTrackOptions {
  double theta_short = 0.5;
  // Missing flow files become zero flow instead of an error.
  bool identity_flow_fallback = false;
};

// Frame-to-frame association over a whole video. Only adjacent frame ids
// are ever matched, so tracklets cover contiguous frame ranges; a one-frame
// gap always splits a track. Detections of different classes are tracked
// independently. Tracklet ids count up from 1 in creation order.
std::vector<Tracklet> track_video(const std::vector<Detection>& fused,
                                  const std::map<int, FlowField>& flows_by_frame,
                                  const EmbeddingStore& store,
                                  const ShortTrackOptions& options);

}  // namespace mots
