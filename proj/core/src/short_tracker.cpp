// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/short_tracker.hpp"

#include <algorithm>

#include "mots/error.hpp"

namespace mots {

CostMatrix build_short_matrix(const std::vector<Detection>& prev,
                              const std::vector<Detection>& curr,
                              const FlowField& flow,
                              const EmbeddingStore& store,
                              double theta_short) {
  CostMatrix m(prev.size(), curr.size());

  std::vector<BinaryMask> warped(prev.size());
  for (std::size_t i = 0; i < prev.size(); ++i) {
    warped[i] = warp_mask(decode_rle(prev[i].mask), flow);
  }
  std::vector<BinaryMask> curr_masks(curr.size());
  for (std::size_t j = 0; j < curr.size(); ++j) {
    curr_masks[j] = decode_rle(curr[j].mask);
  }

  const double max_distance = 1.0 - theta_short;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const auto& fi = store.at(prev[i].frame_id, prev[i].object_key);
    for (std::size_t j = 0; j < curr.size(); ++j) {
      if (mask_iou(warped[i], curr_masks[j]) == 0.0) continue;  // stays infeasible
      const auto& fj = store.at(curr[j].frame_id, curr[j].object_key);
      const double d = 1.0 - cosine_similarity(fi, fj);
      if (d > max_distance) continue;
      m.at(i, j) = d;
    }
  }
  return m;
}

std::vector<std::pair<std::size_t, std::size_t>> solve_assignment(const CostMatrix& matrix) {
  return min_cost_matching(matrix);
}

namespace {

std::vector<Tracklet> track_one_class(const std::vector<const Detection*>& dets,
                                      const std::map<int, FlowField>& flows_by_frame,
                                      const EmbeddingStore& store,
                                      const ShortTrackOptions& options,
                                      int& next_id) {
  std::map<int, std::vector<Detection>> by_frame;
  for (const auto* d : dets) by_frame[d->frame_id].push_back(*d);

  std::vector<Tracklet> tracklets;
  // Index into `tracklets` owning each previous-frame observation.
  std::vector<std::size_t> prev_owner;
  const std::vector<Detection>* prev = nullptr;
  int prev_frame = 0;

  for (auto& [frame, dets_here] : by_frame) {
    std::vector<std::size_t> owner(dets_here.size(), static_cast<std::size_t>(-1));

    if (prev != nullptr && frame == prev_frame + 1) {
      const FlowField* flow = nullptr;
      FlowField fallback;
      if (auto it = flows_by_frame.find(prev_frame); it != flows_by_frame.end()) {
        flow = &it->second;
      } else if (options.identity_flow_fallback) {
        const auto& any = dets_here.front().mask;
        fallback = zero_flow(any.height, any.width);
        flow = &fallback;
      } else {
        throw ValidationError("tracking: no flow for frame pair " +
                              std::to_string(prev_frame) + "->" + std::to_string(frame));
      }
      const auto matrix =
          build_short_matrix(*prev, dets_here, *flow, store, options.theta_short);
      for (const auto& [pi, cj] : min_cost_matching(matrix)) {
        const std::size_t t = prev_owner[pi];
        tracklets[t].observations.push_back({frame, dets_here[cj].object_key});
        owner[cj] = t;
      }
    }

    for (std::size_t j = 0; j < dets_here.size(); ++j) {
      if (owner[j] != static_cast<std::size_t>(-1)) continue;
      Tracklet t;
      t.id = next_id++;
      t.class_id = dets_here[j].class_id;
      t.observations.push_back({frame, dets_here[j].object_key});
      owner[j] = tracklets.size();
      tracklets.push_back(std::move(t));
    }

    prev_owner = std::move(owner);
    prev = &dets_here;
    prev_frame = frame;
  }
  return tracklets;
}

}  // namespace

std::vector<Tracklet> track_video(const std::vector<Detection>& fused,
                                  const std::map<int, FlowField>& flows_by_frame,
                                  const EmbeddingStore& store,
                                  const ShortTrackOptions& options) {
  // Classes never mix inside a tracklet; each class tracks independently.
  std::map<int, std::vector<const Detection*>> by_class;
  for (const auto& d : fused) by_class[d.class_id].push_back(&d);

  int next_id = 1;
  std::vector<Tracklet> all;
  for (const auto& [cls, dets] : by_class) {
    auto part = track_one_class(dets, flows_by_frame, store, options, next_id);
    for (auto& t : part) all.push_back(std::move(t));
  }
  std::sort(all.begin(), all.end(),
            [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
  return all;
}

}  // namespace mots
