// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mots/embedding.hpp"
#include "mots/flow.hpp"
#include "mots/fusion.hpp"
#include "mots/io.hpp"

namespace mots {

struct ScenarioConfig {
  int num_identities = 5;
  int num_frames = 200;
  int frame_height = 192;
  int frame_width = 256;
  int embedding_dim = 32;
  double sigma_within = 0.05;    // stddev of per-observation embedding noise
  double sigma_between = 0.25;   // max |cos| between identity mean embeddings
  double misdetection_rate = 0.0;
  double false_positive_rate = 0.0;
  int occlusion_events = 0;
  std::uint64_t seed = 1;
  int class_id = 2;
  int num_sources = 2;
};

// A fully labeled synthetic video: every detection either maps to one
// ground-truth identity or is flagged a false positive, flows carry the
// exact per-pixel ground-truth displacement, and embeddings cluster by
// identity with configured within/between spreads.
struct Scenario {
  ScenarioConfig config;
  std::vector<Detection> detections;              // all sources, noisy
  EmbeddingStore embeddings;                       // one record per observation
  std::map<int, FlowField> flows;                  // frame t -> field mapping t to t+1
  std::vector<GtLabel> labels;
  std::map<int, std::map<int, BinaryMask>> gt_masks;  // identity -> frame -> mask
};

// Deterministic under config.seed. Identities travel in disjoint horizontal
// lanes on sinusoidal paths; even identities are rectangles, odd ones
// ellipses. Occlusion events steer one identity partway onto another for a
// dozen frames, capping their mask overlap below common suppression
// thresholds. Misdetection drops an observation from every source at once,
// so the gap is real. Throws ValidationError when the identities cannot fit
// the frame, SamplingError when mean embeddings cannot reach the requested
// separation.
Scenario generate_scenario(const ScenarioConfig& config);

// Writes detections_<source>.txt per source, embeddings.remb, gt_labels.txt,
// and flows/<t>_<t+1>.rflw for each adjacent frame pair.
void export_scenario(const Scenario& scenario, const std::string& out_dir);

}  // namespace mots
