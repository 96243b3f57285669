// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/fusion.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "mots/error.hpp"

namespace mots {
namespace {

// Selection priority: higher score first, then lower source id, then input
// order. Used both for suppression and for pixel ownership so the two
// stages never disagree.
bool outranks(const Detection& a, std::size_t ia, const Detection& b, std::size_t ib) {
  if (a.score != b.score) return a.score > b.score;
  if (a.source_id != b.source_id) return a.source_id < b.source_id;
  return ia < ib;
}

std::vector<std::size_t> priority_order(const std::vector<Detection>& dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return outranks(dets[i], i, dets[j], j);
  });
  return order;
}

}  // namespace

std::vector<Detection> nms_iom(const std::vector<Detection>& frame_detections,
                               const FusionConfig& config) {
  const auto order = priority_order(frame_detections);

  std::vector<BinaryMask> kept_masks;
  std::vector<Detection> kept;
  for (const auto i : order) {
    BinaryMask m = decode_rle(frame_detections[i].mask);
    if (mask_area(m) == 0) continue;
    bool suppressed = false;
    for (const auto& km : kept_masks) {
      if (mask_iom(m, km) >= config.iom_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      kept.push_back(frame_detections[i]);
      kept_masks.push_back(std::move(m));
    }
  }
  return kept;
}

std::vector<Detection> resolve_overlaps(std::vector<Detection> survivors) {
  if (survivors.empty()) return survivors;
  const int h = survivors.front().mask.height;
  const int w = survivors.front().mask.width;

  // Claim canvas walked in priority order: the first claimant of a pixel is
  // the best one, later masks lose that pixel.
  const auto order = priority_order(survivors);
  std::vector<std::uint8_t> claimed(static_cast<std::size_t>(h) * w, 0);
  std::vector<BinaryMask> carved(survivors.size());
  for (const auto i : order) {
    BinaryMask m = decode_rle(survivors[i].mask);
    if (m.height != h || m.width != w) {
      throw ValidationError("overlap resolution: mixed mask dimensions in one frame");
    }
    for (std::size_t p = 0; p < m.bits.size(); ++p) {
      if (!m.bits[p]) continue;
      if (claimed[p]) {
        m.bits[p] = 0;
      } else {
        claimed[p] = 1;
      }
    }
    carved[i] = std::move(m);
  }

  std::vector<Detection> out;
  out.reserve(survivors.size());
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    if (mask_area(carved[i]) == 0) continue;
    Detection d = std::move(survivors[i]);
    d.mask = encode_rle(carved[i]);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Detection> fuse_detections(const std::vector<Detection>& detections,
                                       const FusionConfig& config) {
  std::map<int, std::vector<Detection>> by_frame;
  for (const auto& d : detections) by_frame[d.frame_id].push_back(d);

  std::vector<Detection> fused;
  for (auto& [frame, dets] : by_frame) {
    auto resolved = resolve_overlaps(nms_iom(dets, config));
    for (auto& d : resolved) fused.push_back(std::move(d));
  }
  return fused;
}

}  // namespace mots
