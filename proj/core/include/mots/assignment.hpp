// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace mots {

// Forbidden pairs carry this sentinel; they are excluded from the
// assignment problem entirely, never replaced by a large finite cost.
inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

inline bool is_feasible(double cost) { return cost != kInfeasible; }

// Dense rectangular cost matrix. Entries are non-negative or kInfeasible.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cost;  // row-major, size rows*cols

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), cost(r * c, kInfeasible) {}

  double& at(std::size_t r, std::size_t c) { return cost[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return cost[r * cols + c]; }
};

// One-to-one matching over the feasible entries that has maximum size and,
// among those, minimum total cost. Rows and columns with no feasible entry
// stay unmatched. Pairs are returned sorted by row index. Deterministic.
// Throws ValidationError on a negative cost.
std::vector<std::pair<std::size_t, std::size_t>> min_cost_matching(const CostMatrix& matrix);

// Total cost of a match set against a matrix.
double matching_cost(const CostMatrix& matrix,
                     const std::vector<std::pair<std::size_t, std::size_t>>& matches);

}  // namespace mots
