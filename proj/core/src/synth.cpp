// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "mots/error.hpp"
#include "mots/rng.hpp"

namespace mots {
namespace {

namespace fs = std::filesystem;

struct Shape {
  int h = 0;
  int w = 0;
  std::vector<std::uint8_t> bits;  // row-major local bitmap

  std::uint8_t at(int lx, int ly) const {
    return bits[static_cast<std::size_t>(ly) * w + lx];
  }
};

// Even identities are solid rectangles, odd ones inscribed ellipses, so the
// two mask families exercise different run patterns in the codec.
Shape make_shape(int identity, int h, int w) {
  Shape s;
  s.h = h;
  s.w = w;
  s.bits.assign(static_cast<std::size_t>(h) * w, 0);
  if (identity % 2 == 0) {
    std::fill(s.bits.begin(), s.bits.end(), std::uint8_t{1});
    return s;
  }
  const double cx = w / 2.0, cy = h / 2.0;
  const double rx = w / 2.0, ry = h / 2.0;
  for (int ly = 0; ly < h; ++ly) {
    for (int lx = 0; lx < w; ++lx) {
      const double nx = (lx + 0.5 - cx) / rx;
      const double ny = (ly + 0.5 - cy) / ry;
      if (nx * nx + ny * ny <= 1.0) {
        s.bits[static_cast<std::size_t>(ly) * w + lx] = 1;
      }
    }
  }
  return s;
}

BinaryMask place_shape(const Shape& s, int px, int py, int frame_h, int frame_w) {
  BinaryMask m(frame_h, frame_w);
  for (int ly = 0; ly < s.h; ++ly) {
    const int y = py + ly;
    if (y < 0 || y >= frame_h) continue;
    for (int lx = 0; lx < s.w; ++lx) {
      if (!s.at(lx, ly)) continue;
      const int x = px + lx;
      if (x < 0 || x >= frame_w) continue;
      m.set(x, y, 1);
    }
  }
  return m;
}

Embedding random_unit_vector(Rng& rng, int dim) {
  Embedding v(static_cast<std::size_t>(dim));
  double norm2 = 0.0;
  for (auto& x : v) {
    x = static_cast<float>(rng.normal(0.0, 1.0));
    norm2 += static_cast<double>(x) * x;
  }
  const double norm = std::sqrt(norm2);
  if (norm == 0.0) return random_unit_vector(rng, dim);
  for (auto& x : v) x = static_cast<float>(x / norm);
  return v;
}

double cos_between(const Embedding& a, const Embedding& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void validate(const ScenarioConfig& c) {
  if (c.num_identities < 1) throw ValidationError("scenario: need at least one identity");
  if (c.num_frames < 1) throw ValidationError("scenario: need at least one frame");
  if (c.frame_height < 8 || c.frame_width < 16) {
    throw ValidationError("scenario: frame too small");
  }
  if (c.embedding_dim < 2) throw ValidationError("scenario: embedding dim must be >= 2");
  if (c.sigma_within < 0.0 || c.sigma_between <= 0.0 || c.sigma_between > 1.0) {
    throw ValidationError("scenario: similarity spreads out of range");
  }
  if (c.misdetection_rate < 0.0 || c.misdetection_rate > 1.0 ||
      c.false_positive_rate < 0.0 || c.false_positive_rate > 1.0) {
    throw ValidationError("scenario: rates must be in [0,1]");
  }
  if (c.occlusion_events < 0) throw ValidationError("scenario: negative occlusion count");
  if (c.num_sources < 1) throw ValidationError("scenario: need at least one source");
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config) {
  validate(config);
  const int n = config.num_identities;
  const int T = config.num_frames;
  const int H = config.frame_height;
  const int W = config.frame_width;

  // Disjoint horizontal lanes keep identities separated except when an
  // occlusion event deliberately steers one onto another.
  const int lane_h = H / n;
  const int obj_h = std::min(24, lane_h - 4);
  const int obj_w = std::min({32, (obj_h * 4) / 3 + 2, W / 4});
  if (obj_h < 4 || obj_w < 4) {
    throw ValidationError("scenario: identities do not fit the frame; "
                          "grow the frame or drop identities");
  }

  Rng rng(config.seed);
  Scenario sc;
  sc.config = config;

  // Identity mean embeddings: unit vectors rejection-sampled until every
  // pair's |cos| is inside the separation band.
  std::vector<Embedding> means;
  means.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      Embedding cand = random_unit_vector(rng, config.embedding_dim);
      placed = true;
      for (const auto& m : means) {
        if (std::abs(cos_between(cand, m)) > config.sigma_between) {
          placed = false;
          break;
        }
      }
      if (placed) means.push_back(std::move(cand));
    }
    if (!placed) {
      throw SamplingError("scenario: cannot place identity embeddings at |cos| <= " +
                          std::to_string(config.sigma_between));
    }
  }

  // Smooth per-identity trajectories: sinusoidal sweep along the lane with
  // a small vertical wiggle. Positions are integers so flows are exact.
  constexpr double kTau = 2.0 * std::numbers::pi;
  const int margin = 2;
  const int travel = std::max(0, W - 2 * margin - obj_w);
  const int max_wiggle = std::max(0, lane_h - obj_h - 2);
  struct Trajectory {
    double phase, cycles, wiggle, wphase, wcycles;
  };
  std::vector<Trajectory> traj(static_cast<std::size_t>(n));
  for (auto& t : traj) {
    t.phase = rng.uniform01() * kTau;
    t.cycles = 0.5 + rng.uniform01() * 1.5;
    t.wiggle = rng.uniform01() * max_wiggle;
    t.wphase = rng.uniform01() * kTau;
    t.wcycles = 1.0 + rng.uniform01() * 2.0;
  }

  std::vector<std::vector<std::pair<int, int>>> pos(
      static_cast<std::size_t>(n), std::vector<std::pair<int, int>>(static_cast<std::size_t>(T)));
  for (int i = 0; i < n; ++i) {
    const auto& tr = traj[static_cast<std::size_t>(i)];
    const int lane_top = i * lane_h;
    for (int t = 0; t < T; ++t) {
      const double u = T > 1 ? static_cast<double>(t) / (T - 1) : 0.0;
      const double x = margin + travel * (0.5 + 0.5 * std::sin(kTau * tr.cycles * u + tr.phase));
      const double y = lane_top + 1 +
                       tr.wiggle * (0.5 + 0.5 * std::sin(kTau * tr.wcycles * u + tr.wphase));
      pos[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = {
          static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))};
    }
  }

  // Occlusion events: for a dozen frames one lane neighbour is pulled
  // partway onto another, peaking at half-width / third-height offset. The
  // pull aligns x first, while the lanes still separate the pair in y, and
  // then descends on the puller's near side, so the moving mask crosses no
  // third lane and a lone event keeps every pairwise mask overlap under
  // common suppression thresholds at each step of the approach. Concurrent
  // events on entangled identities may still stack deeper.
  const int duration = std::max(4, std::min(12, T / 4));
  for (int e = 0; e < config.occlusion_events && n >= 2; ++e) {
    const int boundary = static_cast<int>(rng.uniform_int(0, n - 2));
    const bool upper_pulls = rng.uniform_int(0, 1) == 1;
    const int a = upper_pulls ? boundary : boundary + 1;
    const int b = upper_pulls ? boundary + 1 : boundary;
    const int start =
        T > duration + 2 ? static_cast<int>(rng.uniform_int(1, T - duration - 1)) : 0;
    for (int t = start; t < start + duration && t < T; ++t) {
      const double lambda =
          std::pow(std::sin(std::numbers::pi * (t - start) / duration), 2.0);
      const double pull_x = std::min(1.0, 2.0 * lambda);
      const double pull_y = std::max(0.0, 2.0 * lambda - 1.0);
      const auto& pa = pos[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
      auto& pb = pos[static_cast<std::size_t>(b)][static_cast<std::size_t>(t)];
      // Approach in x from whichever side leaves the target in bounds, and
      // in y from b's own lane, so neither the border clamp nor the descent
      // path can erase the designed separation from a.
      double tx = pa.first + 0.5 * obj_w;
      if (tx > W - obj_w) tx = pa.first - 0.5 * obj_w;
      const double ty =
          b < a ? pa.second - 0.3 * obj_h : pa.second + 0.3 * obj_h;
      int bx = static_cast<int>(std::lround(pb.first + pull_x * (tx - pb.first)));
      int by = static_cast<int>(std::lround(pb.second + pull_y * (ty - pb.second)));
      bx = std::clamp(bx, 0, W - obj_w);
      by = std::clamp(by, 0, H - obj_h);
      pb = {bx, by};
    }
  }

  // Ground-truth masks.
  std::vector<Shape> shapes;
  shapes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) shapes.push_back(make_shape(i, obj_h, obj_w));
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) {
      const auto [px, py] = pos[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
      sc.gt_masks[i][t + 1] = place_shape(shapes[static_cast<std::size_t>(i)], px, py, H, W);
    }
  }

  // Detections, embeddings, and labels. A misdetection silences the
  // observation in every source at once, so the tracker sees a real gap.
  std::int64_t fp_key = n;
  for (int t = 0; t < T; ++t) {
    const int frame = t + 1;
    for (int i = 0; i < n; ++i) {
      const bool dropped = rng.uniform01() < config.misdetection_rate;
      if (dropped) continue;

      Embedding emb = means[static_cast<std::size_t>(i)];
      for (auto& v : emb) {
        v = static_cast<float>(v + rng.normal(0.0, config.sigma_within));
      }
      sc.embeddings.insert(frame, i, std::move(emb));
      sc.labels.push_back({frame, i, i, false});

      const auto [px, py] = pos[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
      for (int s = 0; s < config.num_sources; ++s) {
        Detection d;
        d.frame_id = frame;
        d.object_key = i;
        d.class_id = config.class_id;
        d.source_id = s;
        if (s == 0) {
          d.score = 0.85 + rng.uniform01() * 0.14;
          d.mask = encode_rle(sc.gt_masks[i][frame]);
        } else {
          // Secondary sources see the object one pixel off per source index.
          d.score = 0.75 + rng.uniform01() * 0.20;
          d.mask = encode_rle(
              place_shape(shapes[static_cast<std::size_t>(i)], px + s, py, H, W));
        }
        sc.detections.push_back(std::move(d));
      }
    }

    for (int s = 0; s < config.num_sources; ++s) {
      if (rng.uniform01() >= config.false_positive_rate) continue;
      const int side = 8;
      const int fx = static_cast<int>(rng.uniform_int(0, W - side - 1));
      const int fy = static_cast<int>(rng.uniform_int(0, H - side - 1));
      Embedding emb = random_unit_vector(rng, config.embedding_dim);
      sc.embeddings.insert(frame, fp_key, std::move(emb));
      sc.labels.push_back({frame, fp_key, -1, true});

      BinaryMask m(H, W);
      for (int y = fy; y < fy + side; ++y) {
        for (int x = fx; x < fx + side; ++x) m.set(x, y, 1);
      }
      Detection d;
      d.frame_id = frame;
      d.object_key = fp_key;
      d.class_id = config.class_id;
      d.source_id = s;
      d.score = 0.80 + rng.uniform01() * 0.10;
      d.mask = encode_rle(m);
      sc.detections.push_back(std::move(d));
      ++fp_key;
    }
  }

  // Exact ground-truth flow: every pixel moves with its identity, higher
  // identities painting over lower ones, background staying put.
  for (int t = 0; t + 1 < T; ++t) {
    FlowField flow(H, W);
    for (int i = 0; i < n; ++i) {
      const auto [px0, py0] = pos[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
      const auto [px1, py1] = pos[static_cast<std::size_t>(i)][static_cast<std::size_t>(t + 1)];
      const auto dx = static_cast<float>(px1 - px0);
      const auto dy = static_cast<float>(py1 - py0);
      const auto& mask = sc.gt_masks[i][t + 1];
      for (int x = 0; x < W; ++x) {
        for (int y = 0; y < H; ++y) {
          if (!mask.at(x, y)) continue;
          const auto f = flow.index(x, y);
          flow.dx[f] = dx;
          flow.dy[f] = dy;
        }
      }
    }
    sc.flows.emplace(t + 1, std::move(flow));
  }

  return sc;
}

void export_scenario(const Scenario& scenario, const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir / "flows", ec);
  if (ec) throw Error("cannot create " + (dir / "flows").string() + ": " + ec.message());

  for (int s = 0; s < scenario.config.num_sources; ++s) {
    std::vector<Detection> dets;
    for (const auto& d : scenario.detections) {
      if (d.source_id == s) dets.push_back(d);
    }
    write_detections((dir / ("detections_" + std::to_string(s) + ".txt")).string(), dets);
  }
  write_embeddings_binary((dir / "embeddings.remb").string(), scenario.embeddings);
  write_gt_labels((dir / "gt_labels.txt").string(), scenario.labels);
  for (const auto& [frame, flow] : scenario.flows) {
    const auto name = std::to_string(frame) + "_" + std::to_string(frame + 1) + ".rflw";
    write_flow((dir / "flows" / name).string(), flow);
  }
}

}  // namespace mots
