// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/embedding.hpp"

#include <cmath>

#include "mots/error.hpp"

namespace mots {

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) {
    throw ValidationError("cosine: embedding dimension mismatch");
  }
  if (a.empty()) {
    throw ValidationError("cosine: empty embeddings");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw ValidationError("cosine: zero-norm embedding");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void EmbeddingStore::insert(int frame_id, std::int64_t object_key, Embedding embedding) {
  if (embedding.empty()) {
    throw ValidationError("embedding store: empty vector");
  }
  if (dim_ == 0) {
    dim_ = static_cast<int>(embedding.size());
  } else if (static_cast<int>(embedding.size()) != dim_) {
    throw ValidationError("embedding store: dimension mismatch on insert");
  }
  entries_[{frame_id, object_key}] = std::move(embedding);
}

bool EmbeddingStore::contains(int frame_id, std::int64_t object_key) const {
  return entries_.count({frame_id, object_key}) > 0;
}

const Embedding& EmbeddingStore::at(int frame_id, std::int64_t object_key) const {
  auto it = entries_.find({frame_id, object_key});
  if (it == entries_.end()) {
    throw ValidationError("embedding store: missing entry for frame " +
                          std::to_string(frame_id) + " key " + std::to_string(object_key));
  }
  return it->second;
}

}  // namespace mots
