// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/evaluation.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mots/assignment.hpp"
#include "mots/error.hpp"

namespace mots {

AssociationReport evaluate_association(const std::vector<Assignment>& result,
                                       const std::vector<GtLabel>& gt) {
  std::map<std::pair<int, std::int64_t>, const GtLabel*> labels;
  std::size_t gt_total = 0;
  for (const auto& l : gt) {
    labels[{l.frame_id, l.object_key}] = &l;
    if (!l.is_false_positive) ++gt_total;
  }

  AssociationReport report;

  // Join, and count duplicate same-frame track ids along the way.
  struct Matched {
    int frame_id;
    int identity;
    int track_id;
  };
  std::vector<Matched> matched;
  std::set<std::pair<int, int>> frame_track;
  for (const auto& a : result) {
    auto it = labels.find({a.frame_id, a.object_key});
    if (it == labels.end()) {
      throw ValidationError("evaluation: observation frame " + std::to_string(a.frame_id) +
                            " key " + std::to_string(a.object_key) +
                            " has no ground-truth label");
    }
    if (!frame_track.insert({a.frame_id, a.track_id}).second) {
      ++report.constraint_violations;
    }
    if (!it->second->is_false_positive) {
      matched.push_back({a.frame_id, it->second->identity_id, a.track_id});
    }
  }

  // Identity switches: walk each identity's matched observations in frame
  // order and count track-id changes.
  std::map<int, std::vector<std::pair<int, int>>> by_identity;  // identity -> (frame, track)
  for (const auto& m : matched) by_identity[m.identity].emplace_back(m.frame_id, m.track_id);
  for (auto& [identity, seq] : by_identity) {
    std::sort(seq.begin(), seq.end());
    for (std::size_t i = 1; i < seq.size(); ++i) {
      if (seq[i].second != seq[i - 1].second) ++report.id_switches;
    }
  }

  // Overlap counts between identities and predicted tracks.
  std::map<std::pair<int, int>, std::size_t> overlap;  // (identity, track) -> count
  std::map<int, std::size_t> track_matched;
  for (const auto& m : matched) {
    ++overlap[{m.identity, m.track_id}];
    ++track_matched[m.track_id];
  }

  // Track purity: every track votes with its matched observations for its
  // majority identity.
  if (!track_matched.empty()) {
    std::map<int, std::size_t> track_best;
    for (const auto& [key, count] : overlap) {
      auto& best = track_best[key.second];
      best = std::max(best, count);
    }
    std::size_t best_sum = 0, total = 0;
    for (const auto& [track, best] : track_best) best_sum += best;
    for (const auto& [track, count] : track_matched) total += count;
    report.track_purity = static_cast<double>(best_sum) / static_cast<double>(total);
  }

  // Identity F1 over an optimal one-to-one pairing of identities to tracks.
  // Max-weight matching via the min-cost solver on a padded square matrix
  // (cost = max overlap - overlap), so the perfect matching minimizing cost
  // maximizes total overlap.
  const std::size_t pred_total = result.size();
  if (gt_total == 0 && pred_total == 0) {
    report.identity_f1 = 1.0;
    return report;
  }
  std::vector<int> identities;
  std::vector<int> tracks;
  for (const auto& [identity, seq] : by_identity) identities.push_back(identity);
  for (const auto& [track, count] : track_matched) tracks.push_back(track);
  std::size_t idtp = 0;
  if (!identities.empty() && !tracks.empty()) {
    std::size_t max_overlap = 0;
    for (const auto& [key, count] : overlap) max_overlap = std::max(max_overlap, count);
    const std::size_t n = std::max(identities.size(), tracks.size());
    CostMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        std::size_t w = 0;
        if (i < identities.size() && j < tracks.size()) {
          auto it = overlap.find({identities[i], tracks[j]});
          if (it != overlap.end()) w = it->second;
        }
        m.at(i, j) = static_cast<double>(max_overlap - w);
      }
    }
    for (const auto& [i, j] : min_cost_matching(m)) {
      if (i < identities.size() && j < tracks.size()) {
        auto it = overlap.find({identities[i], tracks[j]});
        if (it != overlap.end()) idtp += it->second;
      }
    }
  }
  report.identity_f1 = 2.0 * static_cast<double>(idtp) /
                       static_cast<double>(gt_total + pred_total);
  return report;
}

}  // namespace mots
