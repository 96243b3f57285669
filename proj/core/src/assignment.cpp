// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/assignment.hpp"

#include <algorithm>

#include "mots/error.hpp"

namespace mots {

// Successive shortest augmenting paths with Johnson potentials (the
// Jonker-Volgenant family). Each round runs Dijkstra over reduced costs
// from all currently unmatched rows and augments one unmatched column, so
// the matching grows to maximum size with minimum total cost. Forbidden
// entries are simply absent edges.
std::vector<std::pair<std::size_t, std::size_t>> min_cost_matching(const CostMatrix& matrix) {
  const std::size_t R = matrix.rows, C = matrix.cols;
  for (const auto c : matrix.cost) {
    if (is_feasible(c) && c < 0.0) {
      throw ValidationError("assignment: negative cost entry");
    }
  }

  constexpr auto kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> row_match(R, kNone), col_match(C, kNone);
  std::vector<double> pot_row(R, 0.0), pot_col(C, 0.0);

  for (std::size_t round = 0; round < std::min(R, C); ++round) {
    // Multi-source Dijkstra from every unmatched row.
    std::vector<double> dist_row(R, kInfeasible), dist_col(C, kInfeasible);
    std::vector<std::size_t> parent_col(C, kNone);  // row that reached the col
    std::vector<bool> done_row(R, false), done_col(C, false);
    for (std::size_t r = 0; r < R; ++r) {
      if (row_match[r] == kNone) dist_row[r] = 0.0;
    }

    std::size_t reached_col = kNone;
    while (true) {
      // Pick the unsettled node with smallest distance; rows win ties, then
      // lower index, so the scan order is fully deterministic.
      double best = kInfeasible;
      std::size_t best_row = kNone, best_col = kNone;
      for (std::size_t r = 0; r < R; ++r) {
        if (!done_row[r] && dist_row[r] < best) {
          best = dist_row[r];
          best_row = r;
          best_col = kNone;
        }
      }
      for (std::size_t c = 0; c < C; ++c) {
        if (!done_col[c] && dist_col[c] < best) {
          best = dist_col[c];
          best_col = c;
          best_row = kNone;
        }
      }
      if (best_row == kNone && best_col == kNone) break;

      if (best_row != kNone) {
        const std::size_t r = best_row;
        done_row[r] = true;
        for (std::size_t c = 0; c < C; ++c) {
          const double w = matrix.at(r, c);
          if (!is_feasible(w) || done_col[c]) continue;
          if (col_match[c] == r) continue;
          // Reduced cost is non-negative by the potential invariant; tiny
          // negative dust from rounding is clamped.
          const double reduced = std::max(0.0, w + pot_row[r] - pot_col[c]);
          if (dist_row[r] + reduced < dist_col[c]) {
            dist_col[c] = dist_row[r] + reduced;
            parent_col[c] = r;
          }
        }
      } else {
        const std::size_t c = best_col;
        done_col[c] = true;
        if (col_match[c] == kNone) {
          // First settled free column ends the search: its path is shortest.
          reached_col = c;
          break;
        }
        const std::size_t r = col_match[c];
        const double w = matrix.at(r, c);
        const double reduced = std::max(0.0, pot_col[c] - w - pot_row[r]);
        if (dist_col[c] + reduced < dist_row[r]) {
          dist_row[r] = dist_col[c] + reduced;
        }
      }
    }

    if (reached_col == kNone) break;  // no augmenting path left

    // Potentials absorb the settled distances, capped at the target's.
    const double target_dist = dist_col[reached_col];
    for (std::size_t r = 0; r < R; ++r) {
      if (dist_row[r] < target_dist) pot_row[r] += dist_row[r] - target_dist;
    }
    for (std::size_t c = 0; c < C; ++c) {
      if (dist_col[c] < target_dist) pot_col[c] += dist_col[c] - target_dist;
    }

    // Flip matched edges along the augmenting path.
    std::size_t c = reached_col;
    while (c != kNone) {
      const std::size_t r = parent_col[c];
      const std::size_t next_c = row_match[r];
      row_match[r] = c;
      col_match[c] = r;
      c = next_c;
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> matches;
  for (std::size_t r = 0; r < R; ++r) {
    if (row_match[r] != kNone) matches.emplace_back(r, row_match[r]);
  }
  return matches;
}

double matching_cost(const CostMatrix& matrix,
                     const std::vector<std::pair<std::size_t, std::size_t>>& matches) {
  double total = 0.0;
  for (const auto& [r, c] : matches) total += matrix.at(r, c);
  return total;
}

}  // namespace mots
