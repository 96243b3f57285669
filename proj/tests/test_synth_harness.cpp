// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"

#include "mots/error.hpp"
#include "mots/io.hpp"
#include "mots/synth.hpp"
#include "support/oracles.hpp"

using namespace mots;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.num_identities = 3;
  c.num_frames = 40;
  c.frame_height = 96;
  c.frame_width = 128;
  c.embedding_dim = 16;
  c.seed = 5;
  return c;
}

bool detections_equal(const std::vector<Detection>& a, const std::vector<Detection>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].frame_id != b[i].frame_id || a[i].object_key != b[i].object_key ||
        a[i].class_id != b[i].class_id || a[i].score != b[i].score ||
        a[i].source_id != b[i].source_id || !(a[i].mask == b[i].mask)) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("scenario generation is a pure function of the config") {
  const auto a = generate_scenario(small_config());
  const auto b = generate_scenario(small_config());
  CHECK(detections_equal(a.detections, b.detections));
  CHECK(a.embeddings.entries() == b.embeddings.entries());
  CHECK(a.labels.size() == b.labels.size());
  REQUIRE(a.flows.size() == b.flows.size());
  for (const auto& [frame, flow] : a.flows) {
    const auto& other = b.flows.at(frame);
    CHECK(flow.dx == other.dx);
    CHECK(flow.dy == other.dy);
  }

  auto shifted = small_config();
  shifted.seed = 6;
  CHECK(!detections_equal(a.detections, generate_scenario(shifted).detections));
}

TEST_CASE("every detection carries exactly one label") {
  auto config = small_config();
  config.misdetection_rate = 0.2;
  config.false_positive_rate = 0.4;
  const auto sc = generate_scenario(config);

  std::map<std::pair<int, std::int64_t>, const GtLabel*> by_obs;
  for (const auto& l : sc.labels) {
    CHECK(by_obs.emplace(std::pair{l.frame_id, l.object_key}, &l).second);
  }
  std::map<std::pair<int, std::int64_t>, std::set<int>> sources_of;
  for (const auto& d : sc.detections) {
    auto it = by_obs.find({d.frame_id, d.object_key});
    REQUIRE(it != by_obs.end());
    CHECK(sc.embeddings.contains(d.frame_id, d.object_key));
    sources_of[{d.frame_id, d.object_key}].insert(d.source_id);
  }

  int fp_seen = 0;
  for (const auto& [obs, sources] : sources_of) {
    const auto& label = *by_obs.at(obs);
    if (label.is_false_positive) {
      ++fp_seen;
      CHECK(label.identity_id == -1);
      // Clutter is per source, never replicated.
      CHECK(sources.size() == 1);
    } else {
      // A surviving genuine observation shows up in every source.
      CHECK(sources.size() == static_cast<std::size_t>(config.num_sources));
    }
  }
  CHECK(fp_seen > 0);
}

TEST_CASE("misdetections silence all sources at a plausible rate") {
  auto config = small_config();
  config.misdetection_rate = 0.25;
  const auto sc = generate_scenario(config);

  std::set<std::pair<int, int>> present;
  for (const auto& l : sc.labels) {
    if (!l.is_false_positive) present.insert({l.frame_id, l.identity_id});
  }
  const int total = config.num_identities * config.num_frames;
  const auto missing = static_cast<double>(total - static_cast<int>(present.size()));
  const double rate = missing / total;
  CHECK(rate > 0.13);
  CHECK(rate < 0.37);
}

TEST_CASE("identities keep to disjoint lanes without occlusions") {
  const auto sc = generate_scenario(small_config());
  for (int frame = 1; frame <= small_config().num_frames; frame += 7) {
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        CAPTURE(frame);
        CHECK(testsupport::pixel_iou(sc.gt_masks.at(i).at(frame),
                                     sc.gt_masks.at(j).at(frame)) == 0.0);
      }
    }
  }
}

TEST_CASE("occlusion events overlap masks but stay below the suppression zone") {
  ScenarioConfig config;
  config.num_identities = 4;
  config.num_frames = 60;
  config.frame_height = 128;
  config.frame_width = 160;
  config.embedding_dim = 16;
  config.occlusion_events = 2;
  config.seed = 12;
  const auto sc = generate_scenario(config);

  double max_iom = 0.0;
  for (int frame = 1; frame <= config.num_frames; ++frame) {
    for (int i = 0; i < config.num_identities; ++i) {
      for (int j = i + 1; j < config.num_identities; ++j) {
        max_iom = std::max(max_iom, testsupport::pixel_iom(sc.gt_masks.at(i).at(frame),
                                                           sc.gt_masks.at(j).at(frame)));
      }
    }
  }
  CHECK(max_iom > 0.0);   // the events really push identities together
  CHECK(max_iom < 0.5);   // but never into suppression territory
}

TEST_CASE("flows carry the exact ground-truth displacement") {
  const auto sc = generate_scenario(small_config());
  for (int i = 0; i < 3; ++i) {
    for (int frame = 1; frame < small_config().num_frames; ++frame) {
      const auto warped = warp_mask(sc.gt_masks.at(i).at(frame), sc.flows.at(frame));
      CAPTURE(i);
      CAPTURE(frame);
      REQUIRE(warped == sc.gt_masks.at(i).at(frame + 1));
    }
  }
}

TEST_CASE("embeddings cluster by identity with the configured separation") {
  auto config = small_config();
  config.sigma_between = 0.25;
  const auto sc = generate_scenario(config);

  std::map<int, std::vector<double>> mean_of;
  std::map<int, int> count_of;
  for (const auto& l : sc.labels) {
    if (l.is_false_positive) continue;
    const auto& e = sc.embeddings.at(l.frame_id, l.object_key);
    auto& m = mean_of[l.identity_id];
    m.resize(e.size(), 0.0);
    for (std::size_t d = 0; d < e.size(); ++d) m[d] += e[d];
    ++count_of[l.identity_id];
  }
  for (auto& [id, m] : mean_of) {
    for (auto& v : m) v /= count_of[id];
  }
  auto cos_d = [](const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      dot += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    return dot / std::sqrt(na * nb);
  };

  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      // Population means sit at |cos| <= 0.25; sample noise gets slack.
      CHECK(std::abs(cos_d(mean_of[i], mean_of[j])) < 0.4);
    }
  }
  for (const auto& l : sc.labels) {
    if (l.is_false_positive) continue;
    const auto& e = sc.embeddings.at(l.frame_id, l.object_key);
    std::vector<double> ed(e.begin(), e.end());
    CHECK(cos_d(ed, mean_of[l.identity_id]) > 0.85);
  }
}

TEST_CASE("detection scores sit in their per-source bands") {
  auto config = small_config();
  config.false_positive_rate = 0.5;
  const auto sc = generate_scenario(config);
  std::map<std::pair<int, std::int64_t>, bool> fp;
  for (const auto& l : sc.labels) fp[{l.frame_id, l.object_key}] = l.is_false_positive;

  for (const auto& d : sc.detections) {
    if (fp.at({d.frame_id, d.object_key})) {
      CHECK(d.score >= 0.80);
      CHECK(d.score <= 0.90);
    } else if (d.source_id == 0) {
      CHECK(d.score >= 0.85);
      CHECK(d.score <= 0.99);
    } else {
      CHECK(d.score >= 0.75);
      CHECK(d.score <= 0.95);
    }
  }
}

TEST_CASE("impossible geometry or separation is rejected") {
  auto cramped = small_config();
  cramped.num_identities = 5;
  cramped.frame_height = 20;
  CHECK_THROWS_AS(generate_scenario(cramped), ValidationError);

  auto unseparable = small_config();
  unseparable.num_identities = 6;
  unseparable.embedding_dim = 4;
  unseparable.sigma_between = 0.0001;
  CHECK_THROWS_AS(generate_scenario(unseparable), SamplingError);

  auto no_frames = small_config();
  no_frames.num_frames = 0;
  CHECK_THROWS_AS(generate_scenario(no_frames), ValidationError);
}

TEST_CASE("exported files reload into the same scenario") {
  auto config = small_config();
  config.false_positive_rate = 0.3;
  const auto sc = generate_scenario(config);
  testsupport::TempDir dir("synth_export");
  export_scenario(sc, dir.path());

  std::size_t det_total = 0;
  for (int s = 0; s < config.num_sources; ++s) {
    const auto dets =
        read_detections(dir.file("detections_" + std::to_string(s) + ".txt"), s);
    det_total += dets.size();
    for (const auto& d : dets) CHECK(d.source_id == s);
  }
  CHECK(det_total == sc.detections.size());

  const auto store = read_embeddings(dir.file("embeddings.remb"));
  CHECK(store.entries() == sc.embeddings.entries());

  const auto labels = read_gt_labels(dir.file("gt_labels.txt"));
  CHECK(labels.size() == sc.labels.size());

  const auto flows = read_flow_dir(dir.file("flows"));
  REQUIRE(flows.size() == sc.flows.size());
  for (const auto& [frame, flow] : sc.flows) {
    CHECK(flows.at(frame).dx == flow.dx);
    CHECK(flows.at(frame).dy == flow.dy);
  }
}
