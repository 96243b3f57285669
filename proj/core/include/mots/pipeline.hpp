// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mots/stats.hpp"

namespace mots {

// Strictly validated configuration; unknown keys are rejected so a typo can
// never silently fall back to a default.
struct PipelineConfig {
  std::vector<std::string> detection_paths;  // one file per source
  std::string embeddings_path;
  std::string flows_dir;       // may be empty with identity_flow_fallback
  std::string gt_labels_path;  // optional; enables ground-truth triplet pools
  std::string output_dir;

  int video_id = 0;
  double iom_threshold = 0.5;
  int theta_t = 15;
  std::size_t min_samples = 30;
  double fallback_theta_short = 0.5;
  double fallback_theta_long = 0.6;
  int intra_triplets = 1000;
  int inter_triplets = 1000;
  int batch_size = 32;
  int retry_budget = 100;
  std::uint64_t seed = 1;
  bool identity_flow_fallback = false;
  bool normalize_centroids = false;
  bool otsu_thresholds = false;
  bool reuse_smaller_pool = false;
};

// Parses the JSON config text. Unknown keys, wrong types, or out-of-range
// values throw ValidationError naming the key.
PipelineConfig parse_pipeline_config(const std::string& json_text);
PipelineConfig load_pipeline_config(const std::string& path);

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

struct PipelineResult {
  Thresholds thresholds;
  bool theta_short_fallback = false;
  bool theta_long_fallback = false;
  std::size_t fused_observations = 0;
  std::size_t tracklets = 0;
  std::size_t final_tracks = 0;
  std::vector<StageTiming> timings;
  std::vector<std::string> warnings;
};

// Runs fuse -> intra-frame stats -> short-term tracking -> triplet
// manifests -> tracklet merging, writing every artifact into
// config.output_dir: fused.txt, thresholds.txt, histogram data and chart
// files, tracklets.txt, manifest_intra.txt, manifest_inter.txt, batch
// plans, merge_log.txt, result.txt, assignments.txt. Degenerate inputs
// (too few similarity samples, nothing to sample) downgrade to configured
// fallbacks with loud warnings; anything else aborts with the stage name.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

}  // namespace mots
