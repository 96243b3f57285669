// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace mots {

using Embedding = std::vector<float>;

double cosine_similarity(const Embedding& a, const Embedding& b);

// Appearance vectors keyed by (frame id, object key). All entries share one
// dimension, enforced on insert.
class EmbeddingStore {
 public:
  using Key = std::pair<int, std::int64_t>;

  void insert(int frame_id, std::int64_t object_key, Embedding embedding);
  bool contains(int frame_id, std::int64_t object_key) const;
  const Embedding& at(int frame_id, std::int64_t object_key) const;

  int dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::map<Key, Embedding>& entries() const { return entries_; }

 private:
  int dim_ = 0;
  std::map<Key, Embedding> entries_;
};

}  // namespace mots
