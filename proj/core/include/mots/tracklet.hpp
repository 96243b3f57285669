// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace mots {

// Reference to one fused observation. The pair is unique within a video and
// is the key under which its appearance embedding is stored.
struct ObsRef {
  int frame_id = 0;
  std::int64_t object_key = 0;

  friend bool operator==(const ObsRef&, const ObsRef&) = default;
};

// A run of observations linked frame to frame. Observations are kept sorted
// by frame id and cover a contiguous frame range with one entry per frame.
struct Tracklet {
  int id = 0;
  int class_id = 0;
  std::vector<ObsRef> observations;

  int start_frame() const { return observations.front().frame_id; }
  int end_frame() const { return observations.back().frame_id; }
  std::size_t length() const { return observations.size(); }
};

}  // namespace mots
