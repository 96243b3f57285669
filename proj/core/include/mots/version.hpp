// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace mots {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mots
