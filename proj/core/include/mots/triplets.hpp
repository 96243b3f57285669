// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mots/io.hpp"
#include "mots/tracklet.hpp"

namespace mots {

enum class TripletOrigin { kTrainGt, kTargetIntra, kTargetInter };

const char* to_string(TripletOrigin origin);

// One anchor/positive/negative line of a training manifest. The positive is
// either a concrete observation or an augmentation directive telling the
// trainer to derive the positive from the anchor with a pinned seed.
struct TripletSample {
  TripletOrigin origin = TripletOrigin::kTargetIntra;
  int video_id = 0;
  ObsRef anchor;
  bool positive_is_aug = false;
  std::uint64_t aug_seed = 0;
  ObsRef positive;
  ObsRef negative;
};

struct SamplerConfig {
  int video_id = 0;
  int retry_budget = 100;
};

// Groups non-false-positive labels into one frame-sorted pseudo tracklet per
// identity, keeping only observations in `known`; the ground-truth pool for
// labeled triplet sampling. Frames may be non-contiguous.
std::vector<Tracklet> tracklets_from_labels(
    const std::vector<GtLabel>& labels,
    const std::set<std::pair<int, std::int64_t>>& known);

// Emits `count` target triplets (anchor + augmented positive + same-frame
// negative) followed by `count` ground-truth triplets (same identity
// positive, different identity negative) drawn from labeled tracklets.
// Deterministic under seed. Throws SamplingError when no frame has two
// observations, or the labeled set lacks two identities (one with two
// observations). Pass gt_tracklets empty to skip the ground-truth half.
std::vector<TripletSample> sample_intra_frame(
    const std::vector<ObsRef>& target_observations,
    const std::vector<Tracklet>& gt_tracklets,
    int count, std::uint64_t seed, const SamplerConfig& config);

// Emits `count` cross-tracklet triplets: a frame with two active tracklets
// is drawn uniformly, the anchor and negative are those tracklets'
// observations in that frame, and the positive is the anchor tracklet's
// observation in another of its frames. Single-frame anchor tracklets force
// a resample, bounded by config.retry_budget per triplet. Throws
// SamplingError when no two tracklets ever co-occur.
std::vector<TripletSample> sample_inter_tracklet(
    const std::vector<Tracklet>& tracklets,
    int count, std::uint64_t seed, const SamplerConfig& config);

struct BatchPlan {
  int batch_size = 0;
  // batches * batch_size entries; each batch holds exactly batch_size/2
  // ground-truth and batch_size/2 target triplets, alternating.
  std::vector<TripletSample> triplets;

  std::size_t batches() const {
    return batch_size == 0 ? 0 : triplets.size() / static_cast<std::size_t>(batch_size);
  }
};

// Mixes the two pools into batches at an exact 1:1 ratio. Both pools are
// shuffled deterministically by seed; the trailing partial batch is
// dropped. With reuse_smaller_pool the batch count grows to
// (|train| + |target|) / batch_size and the smaller pool's slots are drawn
// with replacement; without it, planning stops when the smaller pool runs
// out. Throws ValidationError on an odd batch_size or an empty pool.
BatchPlan plan_batches(const std::vector<TripletSample>& train_triplets,
                       const std::vector<TripletSample>& target_triplets,
                       int batch_size, std::uint64_t seed,
                       bool reuse_smaller_pool = false);

// Everything the semantic validator needs to know about the video the
// manifest was sampled from.
struct ManifestContext {
  std::map<int, std::set<std::int64_t>> frame_objects;
  // Observation -> short tracklet id, plus each tracklet's frame range.
  std::map<std::pair<int, std::int64_t>, int> tracklet_of;
  std::map<int, std::pair<int, int>> tracklet_range;
  // Observation -> ground-truth identity (for train_gt triplets).
  std::map<std::pair<int, std::int64_t>, int> identity_of;
};

struct ManifestIssue {
  std::size_t index = 0;  // position in the sample list
  std::string message;
};

// Checks every structural constraint the samplers promise. Empty result
// means the manifest is valid against the context.
std::vector<ManifestIssue> validate_manifest(const std::vector<TripletSample>& samples,
                                             const ManifestContext& context);

// Line-oriented manifest file: "# triplet-manifest v1" header carrying tool
// version and master seed, then one triplet per line:
//   origin video_id frame,key frame,key|AUG:seed frame,key
void write_manifest(const std::string& path, const std::vector<TripletSample>& samples,
                    std::uint64_t seed);
struct Manifest {
  std::uint64_t seed = 0;
  std::vector<TripletSample> samples;
};
Manifest read_manifest(const std::string& path);

// Batch plan file: same line format grouped under "# batch <k>" markers.
void write_batch_plan(const std::string& path, const BatchPlan& plan, std::uint64_t seed);

}  // namespace mots
