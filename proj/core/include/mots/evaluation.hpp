// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mots/io.hpp"

namespace mots {

struct AssociationReport {
  // Change events of the predicted track id along each ground-truth
  // identity's frame-ordered matched observations, summed over identities.
  int id_switches = 0;
  // 2 * IDTP / (gt observations + predicted observations), IDTP from an
  // optimal one-to-one pairing of predicted tracks to identities.
  double identity_f1 = 1.0;
  // Observation-weighted share of each track's majority identity.
  double track_purity = 1.0;
  // Same-frame duplicate track ids; must be 0 for a well-formed result.
  int constraint_violations = 0;
};

// Joins predicted assignments to ground-truth labels by exact
// (frame, object_key) and scores identity preservation. False-positive
// observations count against identity_f1 via the prediction total but never
// match an identity. Empty result and empty ground truth score perfect.
// Throws ValidationError when an assignment references an unlabeled
// observation.
AssociationReport evaluate_association(const std::vector<Assignment>& result,
                                       const std::vector<GtLabel>& gt);

}  // namespace mots
