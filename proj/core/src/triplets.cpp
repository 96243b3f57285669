// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/triplets.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mots/error.hpp"
#include "mots/io.hpp"
#include "mots/rng.hpp"
#include "mots/version.hpp"

namespace mots {

const char* to_string(TripletOrigin origin) {
  switch (origin) {
    case TripletOrigin::kTrainGt: return "train_gt";
    case TripletOrigin::kTargetIntra: return "target_intra";
    case TripletOrigin::kTargetInter: return "target_inter";
  }
  return "?";
}

namespace {

TripletOrigin origin_from_string(const std::string& s, std::size_t line_no) {
  if (s == "train_gt") return TripletOrigin::kTrainGt;
  if (s == "target_intra") return TripletOrigin::kTargetIntra;
  if (s == "target_inter") return TripletOrigin::kTargetInter;
  throw ValidationError("manifest parse error at line " + std::to_string(line_no) +
                        ": unknown origin '" + s + "'");
}

// Ground-truth half of the intra-frame stage: anchor and positive share an
// identity, the negative comes from any other identity.
std::vector<TripletSample> sample_train_gt(const std::vector<Tracklet>& gt_tracklets,
                                           int count, Rng& rng, int video_id) {
  std::vector<const Tracklet*> sorted;
  for (const auto& t : gt_tracklets) {
    if (!t.observations.empty()) sorted.push_back(&t);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Tracklet* a, const Tracklet* b) { return a->id < b->id; });

  std::vector<std::size_t> anchorable;  // identities with >= 2 observations
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i]->observations.size() >= 2) anchorable.push_back(i);
  }
  if (anchorable.empty() || sorted.size() < 2) {
    throw SamplingError(
        "ground-truth triplets need two identities, one with two observations");
  }

  std::vector<TripletSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const std::size_t a_index = anchorable[static_cast<std::size_t>(rng.uniform_int(
        0, static_cast<std::int64_t>(anchorable.size()) - 1))];
    const auto& a = *sorted[a_index];
    const auto ai = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(a.observations.size()) - 1));
    auto pi = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(a.observations.size()) - 2));
    if (pi >= ai) ++pi;

    // Uniform over the other identities, then over that identity's frames.
    auto ni = static_cast<std::size_t>(rng.uniform_int(
        0, static_cast<std::int64_t>(sorted.size()) - 2));
    if (ni >= a_index) ++ni;
    const auto& n = *sorted[ni];
    const auto nj = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(n.observations.size()) - 1));

    TripletSample s;
    s.origin = TripletOrigin::kTrainGt;
    s.video_id = video_id;
    s.anchor = a.observations[ai];
    s.positive = a.observations[pi];
    s.negative = n.observations[nj];
    out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<Tracklet> tracklets_from_labels(
    const std::vector<GtLabel>& labels,
    const std::set<std::pair<int, std::int64_t>>& known) {
  std::map<int, Tracklet> by_identity;
  for (const auto& l : labels) {
    if (l.is_false_positive) continue;
    if (!known.count({l.frame_id, l.object_key})) continue;
    auto& t = by_identity[l.identity_id];
    t.id = l.identity_id;
    t.observations.push_back({l.frame_id, l.object_key});
  }
  std::vector<Tracklet> out;
  out.reserve(by_identity.size());
  for (auto& [identity, t] : by_identity) {
    std::sort(t.observations.begin(), t.observations.end(),
              [](const ObsRef& a, const ObsRef& b) {
                return std::pair(a.frame_id, a.object_key) < std::pair(b.frame_id, b.object_key);
              });
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TripletSample> sample_intra_frame(
    const std::vector<ObsRef>& target_observations,
    const std::vector<Tracklet>& gt_tracklets,
    int count, std::uint64_t seed, const SamplerConfig& config) {
  if (count < 1) throw ValidationError("sampler: count must be >= 1");

  std::map<int, std::vector<ObsRef>> by_frame;
  for (const auto& o : target_observations) by_frame[o.frame_id].push_back(o);
  std::vector<const std::vector<ObsRef>*> eligible;
  for (const auto& [frame, obs] : by_frame) {
    if (obs.size() >= 2) eligible.push_back(&obs);
  }
  if (eligible.empty()) {
    throw SamplingError("intra-frame triplets need a frame with two observations");
  }

  Rng rng(seed);
  std::vector<TripletSample> out;
  out.reserve(static_cast<std::size_t>(count) * 2);
  for (int k = 0; k < count; ++k) {
    const auto& obs = *eligible[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(eligible.size()) - 1))];
    const auto ai = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(obs.size()) - 1));
    auto ni = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(obs.size()) - 2));
    if (ni >= ai) ++ni;

    TripletSample s;
    s.origin = TripletOrigin::kTargetIntra;
    s.video_id = config.video_id;
    s.anchor = obs[ai];
    s.positive_is_aug = true;
    s.aug_seed = rng.next_u64();
    s.negative = obs[ni];
    out.push_back(s);
  }

  if (!gt_tracklets.empty()) {
    auto gt = sample_train_gt(gt_tracklets, count, rng, config.video_id);
    out.insert(out.end(), gt.begin(), gt.end());
  }
  return out;
}

std::vector<TripletSample> sample_inter_tracklet(
    const std::vector<Tracklet>& tracklets,
    int count, std::uint64_t seed, const SamplerConfig& config) {
  if (count < 1) throw ValidationError("sampler: count must be >= 1");

  std::vector<const Tracklet*> sorted;
  for (const auto& t : tracklets) {
    if (!t.observations.empty()) sorted.push_back(&t);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Tracklet* a, const Tracklet* b) { return a->id < b->id; });

  // Frames where at least two tracklets are active, with the active set.
  std::map<int, std::vector<std::size_t>> active;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (int f = sorted[i]->start_frame(); f <= sorted[i]->end_frame(); ++f) {
      active[f].push_back(i);
    }
  }
  std::vector<std::pair<int, const std::vector<std::size_t>*>> eligible;
  for (const auto& [frame, ids] : active) {
    if (ids.size() >= 2) eligible.emplace_back(frame, &ids);
  }
  if (eligible.empty()) {
    throw SamplingError("inter-tracklet triplets need two co-occurring tracklets");
  }

  Rng rng(seed);
  std::vector<TripletSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    bool emitted = false;
    for (int attempt = 0; attempt < config.retry_budget; ++attempt) {
      const auto& [frame, ids] = eligible[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(eligible.size()) - 1))];
      const auto ai = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(ids->size()) - 1));
      auto bi = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(ids->size()) - 2));
      if (bi >= ai) ++bi;
      const Tracklet& a = *sorted[(*ids)[ai]];
      const Tracklet& b = *sorted[(*ids)[bi]];
      if (a.observations.size() < 2) continue;  // no second frame for the positive

      auto pf = static_cast<std::size_t>(rng.uniform_int(
          0, static_cast<std::int64_t>(a.observations.size()) - 2));
      const auto anchor_pos = static_cast<std::size_t>(frame - a.start_frame());
      if (pf >= anchor_pos) ++pf;

      TripletSample s;
      s.origin = TripletOrigin::kTargetInter;
      s.video_id = config.video_id;
      s.anchor = a.observations[anchor_pos];
      s.positive = a.observations[pf];
      s.negative = b.observations[static_cast<std::size_t>(frame - b.start_frame())];
      out.push_back(s);
      emitted = true;
      break;
    }
    if (!emitted) {
      throw SamplingError("inter-tracklet sampler exhausted its retry budget (" +
                          std::to_string(config.retry_budget) + " attempts)");
    }
  }
  return out;
}

BatchPlan plan_batches(const std::vector<TripletSample>& train_triplets,
                       const std::vector<TripletSample>& target_triplets,
                       int batch_size, std::uint64_t seed,
                       bool reuse_smaller_pool) {
  if (batch_size < 2 || batch_size % 2 != 0) {
    throw ValidationError("plan_batches: batch_size must be even and positive");
  }
  if (train_triplets.empty() || target_triplets.empty()) {
    throw ValidationError("plan_batches: both pools must be non-empty");
  }
  const std::size_t half = static_cast<std::size_t>(batch_size) / 2;

  Rng rng(seed);
  std::vector<TripletSample> train = train_triplets;
  std::vector<TripletSample> target = target_triplets;
  rng.shuffle(train);
  rng.shuffle(target);

  std::size_t batches;
  if (reuse_smaller_pool) {
    batches = (train.size() + target.size()) / static_cast<std::size_t>(batch_size);
  } else {
    batches = std::min(train.size(), target.size()) / half;
  }

  // The strictly smaller pool is drawn with replacement when reuse is on;
  // every other pool is consumed sequentially from its shuffle.
  const bool train_replaced = reuse_smaller_pool && train.size() < target.size();
  const bool target_replaced = reuse_smaller_pool && target.size() < train.size();
  auto draw = [&rng](const std::vector<TripletSample>& pool, bool replaced,
                     std::size_t serial) {
    if (replaced) {
      return pool[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
    }
    return pool[serial];
  };

  BatchPlan plan;
  plan.batch_size = batch_size;
  plan.triplets.reserve(batches * static_cast<std::size_t>(batch_size));
  std::size_t train_serial = 0, target_serial = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < half; ++i) {
      plan.triplets.push_back(draw(train, train_replaced, train_serial++));
      plan.triplets.push_back(draw(target, target_replaced, target_serial++));
    }
  }
  return plan;
}

std::vector<ManifestIssue> validate_manifest(const std::vector<TripletSample>& samples,
                                             const ManifestContext& context) {
  std::vector<ManifestIssue> issues;
  auto report = [&issues](std::size_t index, std::string message) {
    issues.push_back({index, std::move(message)});
  };
  auto exists = [&context](const ObsRef& o) {
    auto it = context.frame_objects.find(o.frame_id);
    return it != context.frame_objects.end() && it->second.count(o.object_key) > 0;
  };
  auto key = [](const ObsRef& o) { return std::make_pair(o.frame_id, o.object_key); };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!exists(s.anchor)) report(i, "anchor observation not in video");
    if (!exists(s.negative)) report(i, "negative observation not in video");
    if (!s.positive_is_aug && !exists(s.positive)) {
      report(i, "positive observation not in video");
    }

    switch (s.origin) {
      case TripletOrigin::kTargetIntra: {
        if (!s.positive_is_aug) report(i, "intra-frame positive must be an augmentation");
        if (s.anchor.frame_id != s.negative.frame_id) {
          report(i, "intra-frame negative is from a different frame");
        } else if (s.anchor.object_key == s.negative.object_key) {
          report(i, "anchor and negative are the same observation");
        }
        break;
      }
      case TripletOrigin::kTrainGt: {
        if (s.positive_is_aug) {
          report(i, "ground-truth positive must be a real observation");
          break;
        }
        const auto a = context.identity_of.find(key(s.anchor));
        const auto p = context.identity_of.find(key(s.positive));
        const auto n = context.identity_of.find(key(s.negative));
        if (a == context.identity_of.end() || p == context.identity_of.end() ||
            n == context.identity_of.end()) {
          report(i, "ground-truth triplet references an unlabeled observation");
          break;
        }
        if (a->second != p->second) report(i, "anchor and positive identities differ");
        if (s.anchor == s.positive) report(i, "anchor and positive are the same observation");
        if (a->second == n->second) report(i, "anchor and negative identities match");
        break;
      }
      case TripletOrigin::kTargetInter: {
        if (s.positive_is_aug) {
          report(i, "inter-tracklet positive must be a real observation");
          break;
        }
        const auto a = context.tracklet_of.find(key(s.anchor));
        const auto p = context.tracklet_of.find(key(s.positive));
        const auto n = context.tracklet_of.find(key(s.negative));
        if (a == context.tracklet_of.end() || p == context.tracklet_of.end() ||
            n == context.tracklet_of.end()) {
          report(i, "inter-tracklet triplet references an untracked observation");
          break;
        }
        if (a->second != p->second) report(i, "anchor and positive tracklets differ");
        if (s.anchor.frame_id == s.positive.frame_id) {
          report(i, "positive shares the anchor's frame");
        }
        if (a->second == n->second) {
          report(i, "anchor and negative tracklets match");
        } else {
          const auto ra = context.tracklet_range.at(a->second);
          const auto rb = context.tracklet_range.at(n->second);
          if (ra.first > rb.second || rb.first > ra.second) {
            report(i, "anchor and negative tracklets never co-occur");
          }
        }
        break;
      }
    }
  }
  return issues;
}

namespace {

std::string endpoint_to_string(const ObsRef& o) {
  return std::to_string(o.frame_id) + "," + std::to_string(o.object_key);
}

ObsRef endpoint_from_string(const std::string& s, std::size_t line_no) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) {
    throw ValidationError("manifest parse error at line " + std::to_string(line_no) +
                          ": expected frame,key but got '" + s + "'");
  }
  try {
    return {std::stoi(s.substr(0, comma)), std::stoll(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ValidationError("manifest parse error at line " + std::to_string(line_no) +
                          ": bad number in '" + s + "'");
  }
}

std::string sample_to_line(const TripletSample& s) {
  std::string line = std::string(to_string(s.origin)) + " " + std::to_string(s.video_id) +
                     " " + endpoint_to_string(s.anchor) + " ";
  if (s.positive_is_aug) {
    line += "AUG:" + std::to_string(s.aug_seed);
  } else {
    line += endpoint_to_string(s.positive);
  }
  line += " " + endpoint_to_string(s.negative);
  return line;
}

TripletSample sample_from_line(const std::string& line, std::size_t line_no) {
  std::istringstream in(line);
  std::string origin, video, anchor, positive, negative, extra;
  if (!(in >> origin >> video >> anchor >> positive >> negative) || (in >> extra)) {
    throw ValidationError("manifest parse error at line " + std::to_string(line_no) +
                          ": expected 5 fields");
  }
  TripletSample s;
  s.origin = origin_from_string(origin, line_no);
  try {
    s.video_id = std::stoi(video);
  } catch (const std::exception&) {
    throw ValidationError("manifest parse error at line " + std::to_string(line_no) +
                          ": bad video id '" + video + "'");
  }
  s.anchor = endpoint_from_string(anchor, line_no);
  if (positive.rfind("AUG:", 0) == 0) {
    s.positive_is_aug = true;
    try {
      s.aug_seed = std::stoull(positive.substr(4));
    } catch (const std::exception&) {
      throw ValidationError("manifest parse error at line " + std::to_string(line_no) +
                            ": bad augmentation seed '" + positive + "'");
    }
  } else {
    s.positive = endpoint_from_string(positive, line_no);
  }
  s.negative = endpoint_from_string(negative, line_no);
  return s;
}

std::string manifest_header(std::uint64_t seed) {
  return std::string("# triplet-manifest v1\n# tool motsref ") + kVersion +
         "\n# seed " + std::to_string(seed) + "\n";
}

}  // namespace

void write_manifest(const std::string& path, const std::vector<TripletSample>& samples,
                    std::uint64_t seed) {
  std::string out = manifest_header(seed);
  for (const auto& s : samples) {
    out += sample_to_line(s);
    out += "\n";
  }
  atomic_write_text(path, out);
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest: " + path);
  Manifest m;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "# triplet-manifest v1") {
        throw ValidationError("manifest parse error at line " + std::to_string(line_no) +
                              ": missing '# triplet-manifest v1' header");
      }
      saw_header = true;
      continue;
    }
    if (line[0] == '#') {
      std::istringstream hs(line);
      std::string hash, word;
      hs >> hash >> word;
      if (word == "seed") hs >> m.seed;
      continue;
    }
    m.samples.push_back(sample_from_line(line, line_no));
  }
  return m;
}

void write_batch_plan(const std::string& path, const BatchPlan& plan, std::uint64_t seed) {
  std::string out = manifest_header(seed);
  out += "# batch_size " + std::to_string(plan.batch_size) + "\n";
  for (std::size_t i = 0; i < plan.triplets.size(); ++i) {
    if (plan.batch_size > 0 && i % static_cast<std::size_t>(plan.batch_size) == 0) {
      out += "# batch " + std::to_string(i / static_cast<std::size_t>(plan.batch_size)) + "\n";
    }
    out += sample_to_line(plan.triplets[i]);
    out += "\n";
  }
  atomic_write_text(path, out);
}

}  // namespace mots
