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
#include "mots/merging.hpp"
#include "mots/tracklet.hpp"

namespace mots {

// One line of the tracking result format:
//   frame_id track_id class_id img_height img_width rle
struct MotsResultLine {
  int frame_id = 0;
  int track_id = 0;
  int class_id = 0;
  int img_height = 0;
  int img_width = 0;
  std::string rle;
};

// One line of gt_labels.txt:
//   frame_id object_key identity_id is_false_positive
struct GtLabel {
  int frame_id = 0;
  std::int64_t object_key = 0;
  int identity_id = 0;
  bool is_false_positive = false;
};

// One line of assignments.txt, mapping an observation to its final track:
//   frame_id object_key track_id
struct Assignment {
  int frame_id = 0;
  std::int64_t object_key = 0;
  int track_id = 0;
};

// Writes via a temp file in the same directory plus rename, so readers
// never observe a partial file.
void atomic_write_text(const std::string& path, const std::string& content);
void atomic_write_binary(const std::string& path, const std::vector<std::uint8_t>& bytes);

// Result files. Reader reports the line number of the first malformed line
// and rejects duplicate (frame, track) pairs; writer emits lines sorted by
// (frame, track).
std::vector<MotsResultLine> read_mots(const std::string& path);
void write_mots(const std::string& path, std::vector<MotsResultLine> lines);

// Detection files, one line per proposal:
//   frame_id object_key class_id score img_height img_width rle
// source_id is not stored; the reader stamps every row with the given one.
std::vector<Detection> read_detections(const std::string& path, int source_id);
void write_detections(const std::string& path, const std::vector<Detection>& detections);

// Embedding store, binary layout: magic "REMB", version u16, dimension u32,
// record count u64, then per record frame_id u32, object_key u32, and
// dimension little-endian f32 values.
void write_embeddings_binary(const std::string& path, const EmbeddingStore& store);
EmbeddingStore read_embeddings_binary(const std::string& path);

// Text variant for debugging: one record per line, "frame key v0 v1 ...".
void write_embeddings_text(const std::string& path, const EmbeddingStore& store);
EmbeddingStore read_embeddings_text(const std::string& path);

// Sniffs the magic and dispatches to the binary or text reader.
EmbeddingStore read_embeddings(const std::string& path);

// Flow files: magic "RFLW", version u16, height u32, width u32, then
// row-major (dx, dy) little-endian f32 pairs.
void write_flow(const std::string& path, const FlowField& flow);
FlowField read_flow(const std::string& path);

// Reads every <t>_<t+1>.rflw in the directory, keyed by source frame t.
// Any other .rflw file name is an error; other files are ignored. An empty
// dir string yields an empty map.
std::map<int, FlowField> read_flow_dir(const std::string& dir);

std::vector<GtLabel> read_gt_labels(const std::string& path);
void write_gt_labels(const std::string& path, const std::vector<GtLabel>& labels);

// Tracklet files, one line per tracklet:
//   tracklet_id class_id frame:key frame:key ...
std::vector<Tracklet> read_tracklets(const std::string& path);
void write_tracklets(const std::string& path, const std::vector<Tracklet>& tracklets);

std::vector<Assignment> read_assignments(const std::string& path);
void write_assignments(const std::string& path, const std::vector<Assignment>& assignments);

struct TrackOutputs {
  std::vector<MotsResultLine> lines;           // sorted by (frame, track)
  std::vector<Assignment> assignments;         // sorted by (frame, key)
};

// Materializes final tracks as result lines plus assignment rows, pulling
// each observation's mask from the fused detections. Throws when a track
// references an observation with no fused mask.
TrackOutputs materialize_tracks(const std::vector<FinalTrack>& tracks,
                                const std::vector<Detection>& fused);

}  // namespace mots
