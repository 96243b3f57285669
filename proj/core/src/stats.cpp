// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "mots/error.hpp"

namespace mots {
namespace {

constexpr double kSigmaFloor = 1e-9;

double clamp_similarity(double s) { return std::clamp(s, -1.0, 1.0); }

}  // namespace

SummaryStats summarize(const std::vector<double>& values) {
  SummaryStats st;
  st.count = values.size();
  if (values.empty()) return st;
  double sum = 0.0;
  for (const auto v : values) sum += v;
  st.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (const auto v : values) {
    const double d = v - st.mean;
    sq += d * d;
  }
  st.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return st;
}

SimilaritySampleSet collect_intra_frame_similarities(
    const std::vector<Detection>& fused, const EmbeddingStore& store) {
  std::map<int, std::vector<const Detection*>> by_frame;
  for (const auto& d : fused) by_frame[d.frame_id].push_back(&d);

  SimilaritySampleSet set;
  set.kind = SampleKind::kIntraFrameNegative;
  for (const auto& [frame, dets] : by_frame) {
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const auto& a = store.at(frame, dets[i]->object_key);
      for (std::size_t j = i + 1; j < dets.size(); ++j) {
        const auto& b = store.at(frame, dets[j]->object_key);
        set.values.push_back(clamp_similarity(cosine_similarity(a, b)));
      }
    }
  }
  return set;
}

SimilaritySampleSet collect_intra_tracklet_similarities(
    const std::vector<Tracklet>& tracklets, const EmbeddingStore& store) {
  SimilaritySampleSet set;
  set.kind = SampleKind::kIntraTrackletPositive;
  for (const auto& t : tracklets) {
    for (std::size_t i = 0; i < t.observations.size(); ++i) {
      const auto& oa = t.observations[i];
      const auto& a = store.at(oa.frame_id, oa.object_key);
      for (std::size_t j = i + 1; j < t.observations.size(); ++j) {
        const auto& ob = t.observations[j];
        const auto& b = store.at(ob.frame_id, ob.object_key);
        set.values.push_back(clamp_similarity(cosine_similarity(a, b)));
      }
    }
  }
  return set;
}

double estimate_theta_short(const SimilaritySampleSet& samples,
                            const ThresholdConfig& config) {
  if (samples.kind != SampleKind::kIntraFrameNegative) {
    throw ValidationError("theta_short: expects intra-frame negative samples");
  }
  if (samples.values.size() < config.min_samples) {
    throw EstimationError("theta_short: only " + std::to_string(samples.values.size()) +
                          " samples, need " + std::to_string(config.min_samples));
  }
  const auto st = summarize(samples.values);
  return std::min(1.0, st.mean + 3.0 * st.stddev);
}

double gaussian_crossing(const SummaryStats& negatives, const SummaryStats& positives) {
  const double mn = negatives.mean, mp = positives.mean;
  if (!(mp > mn)) {
    throw EstimationError("density crossing: positive mean does not exceed negative mean");
  }
  const double sn = std::max(negatives.stddev, kSigmaFloor);
  const double sp = std::max(positives.stddev, kSigmaFloor);
  if (sn == sp) return 0.5 * (mn + mp);

  const double equal_error = (mn * sp + mp * sn) / (sn + sp);

  // Equal-density condition is quadratic in x; exactly one root lies
  // strictly between the means when the spreads differ.
  const double a = 1.0 / (2.0 * sn * sn) - 1.0 / (2.0 * sp * sp);
  const double b = mp / (sp * sp) - mn / (sn * sn);
  const double c = (mn * mn) / (2.0 * sn * sn) - (mp * mp) / (2.0 * sp * sp) +
                   std::log(sn / sp);
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return equal_error;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double roots[2];
  int n = 0;
  if (a != 0.0) roots[n++] = q / a;
  if (q != 0.0) roots[n++] = c / q;
  std::sort(roots, roots + n);
  for (int i = 0; i < n; ++i) {
    if (roots[i] > mn && roots[i] < mp) return roots[i];
  }
  return equal_error;
}

double otsu_threshold(const std::vector<double>& pooled, int bins) {
  if (pooled.size() < 2 || bins < 2) {
    throw EstimationError("otsu: need at least two samples and two bins");
  }
  const auto [lo_it, hi_it] = std::minmax_element(pooled.begin(), pooled.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    throw EstimationError("otsu: all samples identical");
  }
  const auto hist = build_histogram(pooled, bins, lo, hi);

  const double total = static_cast<double>(pooled.size());
  double sum_all = 0.0;
  for (int i = 0; i < bins; ++i) {
    sum_all += static_cast<double>(i) * static_cast<double>(hist.bins[i]);
  }
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_cut = 0;
  for (int i = 0; i < bins - 1; ++i) {
    w0 += static_cast<double>(hist.bins[i]);
    if (w0 == 0.0) continue;
    const double w1 = total - w0;
    if (w1 == 0.0) break;
    sum0 += static_cast<double>(i) * static_cast<double>(hist.bins[i]);
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_cut = i;
    }
  }
  const double bin_width = (hi - lo) / bins;
  return lo + bin_width * (best_cut + 1);
}

double estimate_theta_long(const SimilaritySampleSet& negatives,
                           const SimilaritySampleSet& positives,
                           const ThresholdConfig& config) {
  if (negatives.kind != SampleKind::kIntraFrameNegative ||
      positives.kind != SampleKind::kIntraTrackletPositive) {
    throw ValidationError("theta_long: sample sets of the wrong kind");
  }
  if (negatives.values.size() < config.min_samples ||
      positives.values.size() < config.min_samples) {
    throw EstimationError("theta_long: fewer than " + std::to_string(config.min_samples) +
                          " samples in a set");
  }
  const auto sn = summarize(negatives.values);
  const auto sp = summarize(positives.values);
  if (config.long_method == LongThresholdMethod::kOtsu) {
    if (!(sp.mean > sn.mean)) {
      throw EstimationError("theta_long: positive mean does not exceed negative mean");
    }
    std::vector<double> pooled;
    pooled.reserve(negatives.values.size() + positives.values.size());
    pooled.insert(pooled.end(), negatives.values.begin(), negatives.values.end());
    pooled.insert(pooled.end(), positives.values.begin(), positives.values.end());
    return otsu_threshold(pooled, config.otsu_bins);
  }
  return gaussian_crossing(sn, sp);
}

Histogram build_histogram(const std::vector<double>& values, int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) {
    throw ValidationError("histogram: need bins >= 1 and hi > lo");
  }
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.bins.assign(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (const auto v : values) {
    if (v < lo || v > hi) continue;
    auto idx = static_cast<std::size_t>((v - lo) / width);
    if (idx >= h.bins.size()) idx = h.bins.size() - 1;
    ++h.bins[idx];
  }
  return h;
}

std::string render_histogram(const Histogram& histogram, int bar_width) {
  std::size_t peak = 1;
  for (const auto c : histogram.bins) peak = std::max(peak, c);
  const double width = (histogram.hi - histogram.lo) / static_cast<double>(histogram.bins.size());

  std::string out;
  char label[64];
  for (std::size_t i = 0; i < histogram.bins.size(); ++i) {
    const double edge = histogram.lo + width * static_cast<double>(i);
    std::snprintf(label, sizeof(label), "%8.4f | ", edge);
    out += label;
    const auto len = static_cast<std::size_t>(
        (static_cast<double>(histogram.bins[i]) / static_cast<double>(peak)) * bar_width);
    out.append(len, '#');
    out += " ";
    out += std::to_string(histogram.bins[i]);
    out += "\n";
  }
  return out;
}

}  // namespace mots
