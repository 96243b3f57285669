// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mots/embedding.hpp"
#include "mots/fusion.hpp"
#include "mots/tracklet.hpp"

namespace mots {

// Population statistics (variance divides by N).
struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

SummaryStats summarize(const std::vector<double>& values);

enum class SampleKind { kIntraFrameNegative, kIntraTrackletPositive };

struct SimilaritySampleSet {
  SampleKind kind = SampleKind::kIntraFrameNegative;
  std::vector<double> values;
};

struct Thresholds {
  double theta_app_short = 0.0;
  double theta_app_long = 0.0;
  int theta_t = 15;
};

enum class LongThresholdMethod { kGaussianCrossing, kOtsu };

struct ThresholdConfig {
  std::size_t min_samples = 30;
  double fallback_theta_short = 0.5;
  double fallback_theta_long = 0.6;
  LongThresholdMethod long_method = LongThresholdMethod::kGaussianCrossing;
  int otsu_bins = 256;
};

// Cosine similarity of every unordered pair of co-frame observations,
// pooled over the video. Two objects in one frame are never the same
// identity, so these samples are negatives.
SimilaritySampleSet collect_intra_frame_similarities(
    const std::vector<Detection>& fused, const EmbeddingStore& store);

// Cosine similarity of every unordered cross-frame pair inside each
// tracklet, pooled. A tracklet carries a single identity, so these are
// positives.
SimilaritySampleSet collect_intra_tracklet_similarities(
    const std::vector<Tracklet>& tracklets, const EmbeddingStore& store);

// mean + 3 * stddev of the negative samples, clamped to 1.0. Similarities
// above it are too high to be a chance co-frame pair. Throws
// EstimationError below config.min_samples.
double estimate_theta_short(const SimilaritySampleSet& samples,
                            const ThresholdConfig& config);

// Crossing point of the two fitted normal densities inside the open
// interval (negative mean, positive mean). Equal spreads give the exact
// midpoint; if no crossing lands inside, the equal-error midpoint
// (mn*sp + mp*sn) / (sn + sp) is used instead.
double gaussian_crossing(const SummaryStats& negatives, const SummaryStats& positives);

// Between-class-variance maximizer over a histogram of the pooled samples;
// configurable alternative to the density crossing.
double otsu_threshold(const std::vector<double>& pooled, int bins);

// Decision boundary between negative and positive similarity populations.
// Throws EstimationError when either set is below config.min_samples or the
// positive mean does not exceed the negative mean.
double estimate_theta_long(const SimilaritySampleSet& negatives,
                           const SimilaritySampleSet& positives,
                           const ThresholdConfig& config);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> bins;
};

Histogram build_histogram(const std::vector<double>& values, int bins, double lo, double hi);

// Plain-text bar chart, one row per bin, bars scaled to the fullest bin.
std::string render_histogram(const Histogram& histogram, int bar_width);

}  // namespace mots
