// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mots/assignment.hpp"
#include "mots/embedding.hpp"
#include "mots/tracklet.hpp"

namespace mots {

// Average pairwise appearance distance between two tracklets:
// (1 / (Na * Nb)) * sum over all cross pairs of (1 - cos).
// kInfeasible when the ids are equal, the frame ranges overlap, or the
// frame gap between the ranges exceeds theta_t.
double tracklet_distance(const Tracklet& a, const Tracklet& b, int theta_t,
                         const EmbeddingStore& store);

// Symmetric matrix of tracklet_distance over all pairs; diagonal infeasible.
CostMatrix build_long_matrix(const std::vector<Tracklet>& tracklets, int theta_t,
                             const EmbeddingStore& store);

struct TrackCluster {
  std::vector<int> member_ids;                  // sorted tracklet ids
  std::vector<std::pair<int, int>> ranges;      // disjoint [start, end], sorted
  std::vector<double> centroid;                 // mean of member observation embeddings
  std::size_t observation_count = 0;
};

struct MergeStep {
  std::size_t step = 0;
  std::vector<int> left_ids;
  std::vector<int> right_ids;
  double distance = 0.0;
  std::vector<std::pair<int, int>> merged_ranges;
};

struct ClusterOptions {
  double cut = 0.4;  // 1 - theta_long
  int theta_t = 15;
  // Normalize each embedding before averaging into the centroid.
  bool normalize_centroids = false;
};

struct ClusterResult {
  std::vector<TrackCluster> clusters;
  std::vector<MergeStep> log;
};

// Constrained agglomeration: repeatedly merge the closest feasible cluster
// pair while its distance is below the cut. Singleton-singleton distances
// are the matrix entries; any pair touching a merged cluster uses centroid
// linkage (1 - cos of mean embeddings). A pair is feasible when no member
// frame ranges overlap and the smallest gap between the two range sets is
// at most theta_t, so merges can chain across time. Ties break on the
// smallest (min member id, other min member id). Output clusters are sorted
// by min member id; the result is invariant under input permutation.
ClusterResult cluster_tracklets(const CostMatrix& matrix,
                                const std::vector<Tracklet>& tracklets,
                                const EmbeddingStore& store,
                                const ClusterOptions& options);

struct FinalTrack {
  int track_id = 0;
  int class_id = 0;
  std::vector<ObsRef> observations;  // frame-sorted
};

// Gives every cluster one final track id, numbered class_id * 1000 + 1
// upward in order of first appearance. Throws if a cluster holds two
// observations in one frame, which would mean the constraints were broken.
std::vector<FinalTrack> relabel_tracks(const std::vector<Tracklet>& tracklets,
                                       const std::vector<TrackCluster>& clusters);

// Text form of the merge log, one line per step:
//   step <k> merge [ids] + [ids] dist <d> ranges [a..b][c..d]
std::string format_merge_log(const std::vector<MergeStep>& log);

}  // namespace mots
