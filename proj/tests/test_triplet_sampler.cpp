// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"

#include "mots/error.hpp"
#include "mots/rng.hpp"
#include "mots/triplets.hpp"
#include "support/oracles.hpp"

using namespace mots;

namespace {

bool same_sample(const TripletSample& a, const TripletSample& b) {
  return a.origin == b.origin && a.video_id == b.video_id && a.anchor == b.anchor &&
         a.positive_is_aug == b.positive_is_aug && a.aug_seed == b.aug_seed &&
         a.positive == b.positive && a.negative == b.negative;
}

bool same_samples(const std::vector<TripletSample>& a, const std::vector<TripletSample>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_sample(a[i], b[i])) return false;
  }
  return true;
}

// 10 frames, three objects each: keys 0 and 1 are identities 100 and 200,
// key 2 is a false positive.
struct IntraFixture {
  std::vector<ObsRef> observations;
  std::vector<GtLabel> labels;
  std::vector<Tracklet> gt_tracklets;
  ManifestContext context;

  IntraFixture() {
    std::set<std::pair<int, std::int64_t>> known;
    for (int frame = 1; frame <= 10; ++frame) {
      for (std::int64_t key = 0; key < 3; ++key) {
        observations.push_back({frame, key});
        known.insert({frame, key});
        context.frame_objects[frame].insert(key);
      }
      labels.push_back({frame, 0, 100, false});
      labels.push_back({frame, 1, 200, false});
      labels.push_back({frame, 2, -1, true});
      context.identity_of[{frame, 0}] = 100;
      context.identity_of[{frame, 1}] = 200;
    }
    gt_tracklets = tracklets_from_labels(labels, known);
  }
};

std::vector<TripletSample> distinct_pool(TripletOrigin origin, int n, int tag) {
  std::vector<TripletSample> pool;
  for (int i = 0; i < n; ++i) {
    TripletSample s;
    s.origin = origin;
    s.anchor = {i, tag * 10000 + i};
    s.positive_is_aug = origin == TripletOrigin::kTargetIntra;
    if (s.positive_is_aug) {
      s.aug_seed = static_cast<std::uint64_t>(i) * 7 + 1;
    } else {
      s.positive = {i + 1, tag * 10000 + i};
    }
    s.negative = {i, tag * 10000 + 5000 + i};
    pool.push_back(s);
  }
  return pool;
}

}  // namespace

TEST_CASE("label grouping keeps only known, genuine observations") {
  IntraFixture fx;
  REQUIRE(fx.gt_tracklets.size() == 2);
  CHECK(fx.gt_tracklets[0].id == 100);
  CHECK(fx.gt_tracklets[1].id == 200);
  for (const auto& t : fx.gt_tracklets) {
    REQUIRE(t.observations.size() == 10);
    CHECK(std::is_sorted(t.observations.begin(), t.observations.end(),
                         [](const ObsRef& a, const ObsRef& b) {
                           return a.frame_id < b.frame_id;
                         }));
  }

  // Observations missing from `known` drop out silently.
  const auto partial = tracklets_from_labels(fx.labels, {{1, 0}, {2, 0}});
  REQUIRE(partial.size() == 1);
  CHECK(partial[0].id == 100);
  CHECK(partial[0].observations.size() == 2);
}

TEST_CASE("same-frame sampling yields valid, well-formed manifests") {
  IntraFixture fx;
  const auto samples = sample_intra_frame(fx.observations, fx.gt_tracklets, 40, 99, {});
  REQUIRE(samples.size() == 80);

  for (std::size_t i = 0; i < 40; ++i) {
    const auto& s = samples[i];
    CAPTURE(i);
    CHECK(s.origin == TripletOrigin::kTargetIntra);
    CHECK(s.positive_is_aug);
    CHECK(s.anchor.frame_id == s.negative.frame_id);
    CHECK(!(s.anchor == s.negative));
  }
  for (std::size_t i = 40; i < 80; ++i) {
    const auto& s = samples[i];
    CAPTURE(i);
    CHECK(s.origin == TripletOrigin::kTrainGt);
    CHECK(!s.positive_is_aug);
    const int anchor_id = fx.context.identity_of.at({s.anchor.frame_id, s.anchor.object_key});
    const int pos_id = fx.context.identity_of.at({s.positive.frame_id, s.positive.object_key});
    const int neg_id = fx.context.identity_of.at({s.negative.frame_id, s.negative.object_key});
    CHECK(anchor_id == pos_id);
    CHECK(!(s.anchor == s.positive));
    CHECK(anchor_id != neg_id);
  }

  CHECK(validate_manifest(samples, fx.context).empty());
  CHECK(testsupport::manifest_issues_oracle(samples, fx.context).empty());
}

TEST_CASE("sampling without labels emits the target half only") {
  IntraFixture fx;
  const auto samples = sample_intra_frame(fx.observations, {}, 25, 7, {});
  REQUIRE(samples.size() == 25);
  for (const auto& s : samples) CHECK(s.origin == TripletOrigin::kTargetIntra);
  CHECK(validate_manifest(samples, fx.context).empty());
}

TEST_CASE("the sampler is a pure function of its seed") {
  IntraFixture fx;
  const auto a = sample_intra_frame(fx.observations, fx.gt_tracklets, 30, 5, {});
  const auto b = sample_intra_frame(fx.observations, fx.gt_tracklets, 30, 5, {});
  const auto c = sample_intra_frame(fx.observations, fx.gt_tracklets, 30, 6, {});
  CHECK(same_samples(a, b));
  CHECK(!same_samples(a, c));

  // Distinct augmentation seeds per triplet, drawn from the same stream.
  std::set<std::uint64_t> aug_seeds;
  for (std::size_t i = 0; i < 30; ++i) aug_seeds.insert(a[i].aug_seed);
  CHECK(aug_seeds.size() == 30);
}

TEST_CASE("same-frame sampling needs a frame with two observations") {
  std::vector<ObsRef> lonely;
  for (int frame = 1; frame <= 8; ++frame) lonely.push_back({frame, 0});
  CHECK_THROWS_AS(sample_intra_frame(lonely, {}, 10, 1, {}), SamplingError);

  // Two identities but one observation each: no ground-truth positive.
  IntraFixture fx;
  std::vector<GtLabel> thin = {{1, 0, 100, false}, {1, 1, 200, false}};
  const auto gt = tracklets_from_labels(thin, {{1, 0}, {1, 1}});
  CHECK_THROWS_AS(sample_intra_frame(fx.observations, gt, 10, 1, {}), SamplingError);
}

TEST_CASE("cross-tracklet sampling respects tracklet structure") {
  Tracklet a, b, c;
  a.id = 1;
  b.id = 2;
  c.id = 3;
  for (int f = 1; f <= 5; ++f) a.observations.push_back({f, 10});
  for (int f = 3; f <= 8; ++f) b.observations.push_back({f, 20});
  for (int f = 10; f <= 12; ++f) c.observations.push_back({f, 30});

  ManifestContext ctx;
  for (const auto& t : {a, b, c}) {
    ctx.tracklet_range[t.id] = {t.start_frame(), t.end_frame()};
    for (const auto& o : t.observations) {
      ctx.frame_objects[o.frame_id].insert(o.object_key);
      ctx.tracklet_of[{o.frame_id, o.object_key}] = t.id;
    }
  }

  const auto samples = sample_inter_tracklet({a, b, c}, 30, 17, {});
  REQUIRE(samples.size() == 30);
  for (const auto& s : samples) {
    CHECK(s.origin == TripletOrigin::kTargetInter);
    CHECK(!s.positive_is_aug);
    // Anchor and negative share a frame; only tracklets 1 and 2 co-occur.
    CHECK(s.anchor.frame_id == s.negative.frame_id);
    const int anchor_t = ctx.tracklet_of.at({s.anchor.frame_id, s.anchor.object_key});
    const int neg_t = ctx.tracklet_of.at({s.negative.frame_id, s.negative.object_key});
    const int pos_t = ctx.tracklet_of.at({s.positive.frame_id, s.positive.object_key});
    CHECK(anchor_t != neg_t);
    CHECK(pos_t == anchor_t);
    CHECK(s.positive.frame_id != s.anchor.frame_id);
    CHECK(anchor_t != 3);
    CHECK(neg_t != 3);
  }
  CHECK(validate_manifest(samples, ctx).empty());
  CHECK(testsupport::manifest_issues_oracle(samples, ctx).empty());

  const auto again = sample_inter_tracklet({a, b, c}, 30, 17, {});
  CHECK(same_samples(samples, again));
}

TEST_CASE("cross-tracklet sampling fails without usable co-occurrence") {
  Tracklet a, b;
  a.id = 1;
  b.id = 2;
  for (int f = 1; f <= 3; ++f) a.observations.push_back({f, 10});
  for (int f = 5; f <= 8; ++f) b.observations.push_back({f, 20});
  CHECK_THROWS_AS(sample_inter_tracklet({a, b}, 5, 1, {}), SamplingError);

  // Co-occurring but single-frame: no anchor can supply a positive, so the
  // retry budget runs dry.
  Tracklet d, e;
  d.id = 1;
  e.id = 2;
  d.observations = {{5, 0}};
  e.observations = {{5, 1}};
  CHECK_THROWS_AS(sample_inter_tracklet({d, e}, 5, 1, {}), SamplingError);
}

TEST_CASE("batch planning holds the exact half-and-half mix") {
  const auto train = distinct_pool(TripletOrigin::kTrainGt, 30, 1);
  const auto target = distinct_pool(TripletOrigin::kTargetIntra, 50, 2);

  const auto plan = plan_batches(train, target, 10, 42);
  CHECK(plan.batch_size == 10);
  CHECK(plan.batches() == 6);  // min(30, 50) / 5
  REQUIRE(plan.triplets.size() == 60);

  std::map<std::int64_t, int> uses;
  for (std::size_t i = 0; i < plan.triplets.size(); ++i) {
    const auto& s = plan.triplets[i];
    const bool train_slot = i % 2 == 0;
    CHECK(s.origin == (train_slot ? TripletOrigin::kTrainGt : TripletOrigin::kTargetIntra));
    ++uses[s.anchor.object_key];
  }
  // Without reuse no triplet is drawn twice.
  for (const auto& [key, n] : uses) CHECK(n == 1);

  const auto same = plan_batches(train, target, 10, 42);
  CHECK(same_samples(plan.triplets, same.triplets));
}

TEST_CASE("reuse stretches the smaller pool with replacement") {
  const auto train = distinct_pool(TripletOrigin::kTrainGt, 10, 1);
  const auto target = distinct_pool(TripletOrigin::kTargetIntra, 50, 2);

  const auto plan = plan_batches(train, target, 10, 42, true);
  CHECK(plan.batches() == 6);  // (10 + 50) / 10
  REQUIRE(plan.triplets.size() == 60);

  std::map<std::int64_t, int> target_uses;
  int train_draws = 0;
  for (std::size_t i = 0; i < plan.triplets.size(); ++i) {
    const auto& s = plan.triplets[i];
    if (i % 2 == 0) {
      CHECK(s.origin == TripletOrigin::kTrainGt);
      ++train_draws;
    } else {
      CHECK(s.origin == TripletOrigin::kTargetIntra);
      ++target_uses[s.anchor.object_key];
    }
  }
  CHECK(train_draws == 30);  // 10 distinct stretched over 30 slots
  // The larger pool is still consumed without replacement.
  for (const auto& [key, n] : target_uses) CHECK(n == 1);
}

TEST_CASE("batch planning rejects bad shapes") {
  const auto train = distinct_pool(TripletOrigin::kTrainGt, 4, 1);
  const auto target = distinct_pool(TripletOrigin::kTargetIntra, 4, 2);
  CHECK_THROWS_AS(plan_batches(train, target, 5, 1), ValidationError);
  CHECK_THROWS_AS(plan_batches(train, target, 0, 1), ValidationError);
  CHECK_THROWS_AS(plan_batches({}, target, 4, 1), ValidationError);
  CHECK_THROWS_AS(plan_batches(train, {}, 4, 1), ValidationError);
}

TEST_CASE("manifest files survive a round trip and reject damage") {
  IntraFixture fx;
  auto samples = sample_intra_frame(fx.observations, fx.gt_tracklets, 12, 3, {});
  samples.front().aug_seed = 0xFFFFFFFFFFFFFFFFull;  // extremes must serialize

  testsupport::TempDir dir("manifest");
  const auto path = dir.file("manifest.txt");
  write_manifest(path, samples, 12345);

  const auto loaded = read_manifest(path);
  CHECK(loaded.seed == 12345);
  CHECK(same_samples(loaded.samples, samples));

  const auto text = testsupport::read_file(path);
  CHECK(text.find("# triplet-manifest v1") == 0);
  CHECK(text.find("# seed 12345") != std::string::npos);

  const auto bad_header = dir.file("bad_header.txt");
  std::ofstream(bad_header) << "# something else\n";
  CHECK_THROWS_AS(read_manifest(bad_header), ValidationError);

  const auto bad_line = dir.file("bad_line.txt");
  std::ofstream(bad_line) << "# triplet-manifest v1\n# seed 1\nnot a triplet line\n";
  CHECK_THROWS_AS(read_manifest(bad_line), ValidationError);

  CHECK_THROWS_AS(read_manifest(dir.file("absent.txt")), ValidationError);
}

TEST_CASE("the validator and its oracle both catch planted defects") {
  IntraFixture fx;
  auto samples = sample_intra_frame(fx.observations, fx.gt_tracklets, 10, 3, {});

  SUBCASE("anchor outside the video") { samples[2].anchor = {99, 0}; }
  SUBCASE("negative from another frame") { samples[3].negative = {samples[3].anchor.frame_id % 10 + 1, 0}; }
  SUBCASE("gt positive with the wrong identity") {
    auto& s = samples[14];  // train_gt half
    REQUIRE(s.origin == TripletOrigin::kTrainGt);
    s.positive = s.negative;
  }

  const auto issues = validate_manifest(samples, fx.context);
  const auto oracle = testsupport::manifest_issues_oracle(samples, fx.context);
  CHECK(!issues.empty());
  CHECK(!oracle.empty());
}
