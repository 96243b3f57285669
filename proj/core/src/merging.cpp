// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/merging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "mots/error.hpp"

namespace mots {
namespace {

using Interval = std::pair<int, int>;

bool intervals_overlap(const Interval& a, const Interval& b) {
  return a.first <= b.second && b.first <= a.second;
}

// Frame gap between two intervals, 0 when they touch or overlap.
int interval_gap(const Interval& a, const Interval& b) {
  return std::max({b.first - a.second, a.first - b.second, 0});
}

std::vector<Interval> coalesce(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end());
  std::vector<Interval> out;
  for (const auto& iv : intervals) {
    if (!out.empty() && iv.first <= out.back().second + 1) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

double cosine_double(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw ValidationError("centroid linkage: zero-norm centroid");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct Cluster {
  std::vector<std::size_t> member_indices;  // into the id-sorted tracklet list
  std::vector<int> member_ids;              // sorted
  std::vector<Interval> ranges;             // disjoint, sorted
  std::vector<double> embedding_sum;
  std::size_t observation_count = 0;

  int min_id() const { return member_ids.front(); }
};

bool cluster_pair_feasible(const Cluster& a, const Cluster& b, int theta_t) {
  int min_gap = theta_t + 1;
  for (const auto& ra : a.ranges) {
    for (const auto& rb : b.ranges) {
      if (intervals_overlap(ra, rb)) return false;
      min_gap = std::min(min_gap, interval_gap(ra, rb));
    }
  }
  return min_gap <= theta_t;
}

}  // namespace

double tracklet_distance(const Tracklet& a, const Tracklet& b, int theta_t,
                         const EmbeddingStore& store) {
  if (a.id == b.id) return kInfeasible;
  const Interval ra{a.start_frame(), a.end_frame()};
  const Interval rb{b.start_frame(), b.end_frame()};
  if (intervals_overlap(ra, rb)) return kInfeasible;
  if (interval_gap(ra, rb) > theta_t) return kInfeasible;

  double sum = 0.0;
  for (const auto& oa : a.observations) {
    const auto& fa = store.at(oa.frame_id, oa.object_key);
    for (const auto& ob : b.observations) {
      const auto& fb = store.at(ob.frame_id, ob.object_key);
      sum += 1.0 - cosine_similarity(fa, fb);
    }
  }
  return sum / (static_cast<double>(a.observations.size()) *
                static_cast<double>(b.observations.size()));
}

CostMatrix build_long_matrix(const std::vector<Tracklet>& tracklets, int theta_t,
                             const EmbeddingStore& store) {
  const std::size_t n = tracklets.size();
  CostMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = tracklet_distance(tracklets[i], tracklets[j], theta_t, store);
      m.at(i, j) = d;
      m.at(j, i) = d;
    }
  }
  return m;
}

ClusterResult cluster_tracklets(const CostMatrix& matrix,
                                const std::vector<Tracklet>& tracklets,
                                const EmbeddingStore& store,
                                const ClusterOptions& options) {
  if (matrix.rows != tracklets.size() || matrix.cols != tracklets.size()) {
    throw ValidationError("clustering: matrix size does not match tracklet count");
  }

  // Tracklets enter in id order so the walk below never depends on input
  // permutation; matrix lookups go through the original index.
  std::vector<std::size_t> order(tracklets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return tracklets[x].id < tracklets[y].id;
  });

  std::vector<Cluster> clusters;
  clusters.reserve(tracklets.size());
  for (const auto idx : order) {
    const auto& t = tracklets[idx];
    Cluster c;
    c.member_indices = {idx};
    c.member_ids = {t.id};
    c.ranges = {{t.start_frame(), t.end_frame()}};
    c.observation_count = t.observations.size();
    for (const auto& o : t.observations) {
      const auto& f = store.at(o.frame_id, o.object_key);
      if (c.embedding_sum.empty()) c.embedding_sum.assign(f.size(), 0.0);
      if (options.normalize_centroids) {
        double norm = 0.0;
        for (const auto v : f) norm += static_cast<double>(v) * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) throw ValidationError("clustering: zero-norm embedding");
        for (std::size_t d = 0; d < f.size(); ++d) c.embedding_sum[d] += f[d] / norm;
      } else {
        for (std::size_t d = 0; d < f.size(); ++d) c.embedding_sum[d] += f[d];
      }
    }
    clusters.push_back(std::move(c));
  }

  // Pair distance: the Eq-style matrix entry while both sides are single
  // tracklets, centroid linkage as soon as either side is a merged cluster.
  auto pair_distance = [&](const Cluster& a, const Cluster& b) {
    if (a.member_indices.size() == 1 && b.member_indices.size() == 1) {
      return matrix.at(a.member_indices[0], b.member_indices[0]);
    }
    if (!cluster_pair_feasible(a, b, options.theta_t)) return kInfeasible;
    return 1.0 - cosine_double(a.embedding_sum, b.embedding_sum);
  };

  ClusterResult result;
  while (clusters.size() > 1) {
    double best = kInfeasible;
    std::pair<int, int> best_key{0, 0};
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double d = pair_distance(clusters[i], clusters[j]);
        if (!is_feasible(d) || d >= options.cut) continue;
        const int ka = clusters[i].min_id(), kb = clusters[j].min_id();
        const std::pair<int, int> k{std::min(ka, kb), std::max(ka, kb)};
        if (!found || d < best || (d == best && k < best_key)) {
          best = d;
          best_key = k;
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (!found) break;

    Cluster merged;
    const Cluster& a = clusters[bi];
    const Cluster& b = clusters[bj];
    merged.member_indices = a.member_indices;
    merged.member_indices.insert(merged.member_indices.end(), b.member_indices.begin(),
                                 b.member_indices.end());
    merged.member_ids = a.member_ids;
    merged.member_ids.insert(merged.member_ids.end(), b.member_ids.begin(),
                             b.member_ids.end());
    std::sort(merged.member_ids.begin(), merged.member_ids.end());
    auto ranges = a.ranges;
    ranges.insert(ranges.end(), b.ranges.begin(), b.ranges.end());
    merged.ranges = coalesce(std::move(ranges));
    merged.embedding_sum = a.embedding_sum;
    for (std::size_t d = 0; d < merged.embedding_sum.size(); ++d) {
      merged.embedding_sum[d] += b.embedding_sum[d];
    }
    merged.observation_count = a.observation_count + b.observation_count;

    MergeStep step;
    step.step = result.log.size() + 1;
    step.left_ids = a.member_ids;
    step.right_ids = b.member_ids;
    step.distance = best;
    step.merged_ranges = merged.ranges;
    result.log.push_back(std::move(step));

    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    clusters[bi] = std::move(merged);
  }

  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.min_id() < b.min_id(); });
  result.clusters.reserve(clusters.size());
  for (auto& c : clusters) {
    TrackCluster out;
    out.member_ids = std::move(c.member_ids);
    out.ranges = std::move(c.ranges);
    out.observation_count = c.observation_count;
    out.centroid.resize(c.embedding_sum.size());
    for (std::size_t d = 0; d < c.embedding_sum.size(); ++d) {
      out.centroid[d] = c.embedding_sum[d] / static_cast<double>(c.observation_count);
    }
    result.clusters.push_back(std::move(out));
  }
  return result;
}

std::vector<FinalTrack> relabel_tracks(const std::vector<Tracklet>& tracklets,
                                       const std::vector<TrackCluster>& clusters) {
  std::map<int, const Tracklet*> by_id;
  for (const auto& t : tracklets) {
    if (!by_id.emplace(t.id, &t).second) {
      throw Error("relabel: duplicate tracklet id " + std::to_string(t.id));
    }
  }

  std::set<int> seen;
  struct Pending {
    int class_id = 0;
    int first_frame = 0;
    int min_member = 0;
    std::vector<ObsRef> observations;
  };
  std::vector<Pending> pending;
  for (const auto& c : clusters) {
    Pending p;
    p.min_member = c.member_ids.empty() ? 0 : c.member_ids.front();
    bool first = true;
    for (const auto id : c.member_ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw Error("relabel: cluster references unknown tracklet " + std::to_string(id));
      }
      if (!seen.insert(id).second) {
        throw Error("relabel: tracklet " + std::to_string(id) + " in two clusters");
      }
      const Tracklet& t = *it->second;
      if (first) {
        p.class_id = t.class_id;
        first = false;
      } else if (p.class_id != t.class_id) {
        throw Error("relabel: cluster mixes classes");
      }
      p.observations.insert(p.observations.end(), t.observations.begin(),
                            t.observations.end());
    }
    std::sort(p.observations.begin(), p.observations.end(),
              [](const ObsRef& a, const ObsRef& b) { return a.frame_id < b.frame_id; });
    for (std::size_t i = 1; i < p.observations.size(); ++i) {
      if (p.observations[i].frame_id == p.observations[i - 1].frame_id) {
        throw Error("relabel: cluster holds two observations in frame " +
                    std::to_string(p.observations[i].frame_id));
      }
    }
    if (!p.observations.empty()) p.first_frame = p.observations.front().frame_id;
    pending.push_back(std::move(p));
  }
  if (seen.size() != by_id.size()) {
    throw Error("relabel: clusters do not cover every tracklet");
  }

  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    if (a.first_frame != b.first_frame) return a.first_frame < b.first_frame;
    return a.min_member < b.min_member;
  });

  std::vector<FinalTrack> tracks;
  tracks.reserve(pending.size());
  int current_class = 0;
  int serial = 0;
  for (auto& p : pending) {
    if (tracks.empty() || p.class_id != current_class) {
      current_class = p.class_id;
      serial = 0;
    }
    ++serial;
    FinalTrack t;
    t.track_id = p.class_id * 1000 + serial;
    t.class_id = p.class_id;
    t.observations = std::move(p.observations);
    tracks.push_back(std::move(t));
  }
  return tracks;
}

std::string format_merge_log(const std::vector<MergeStep>& log) {
  auto ids_to_string = [](const std::vector<int>& ids) {
    std::string s = "[";
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(ids[i]);
    }
    return s + "]";
  };
  std::string out;
  char buf[32];
  for (const auto& step : log) {
    std::snprintf(buf, sizeof(buf), "%.6f", step.distance);
    out += "step " + std::to_string(step.step) + " merge " + ids_to_string(step.left_ids) +
           " + " + ids_to_string(step.right_ids) + " dist " + buf + " ranges ";
    for (const auto& [lo, hi] : step.merged_ranges) {
      out += "[" + std::to_string(lo) + ".." + std::to_string(hi) + "]";
    }
    out += "\n";
  }
  return out;
}

}  // namespace mots
