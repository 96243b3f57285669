// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mots {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: bad file contents, bad config, violated preconditions.
// The CLI maps these to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

// A data-driven estimator could not produce a value (too few samples,
// distributions not separated).  Callers are expected to fall back to a
// configured default.
struct EstimationError : Error {
  using Error::Error;
};

// A sampler could not satisfy its constraints on the given data.
struct SamplingError : Error {
  using Error::Error;
};

}  // namespace mots
