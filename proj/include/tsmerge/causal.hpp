// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <utility>

#include "tsmerge/seqcore.hpp"

namespace tsmerge {

/// Merging restricted to adjacent pairs (k = 1). Spans stay contiguous and
/// strictly increasing; for odd t the most recent token is never merged.
std::pair<TokenMatrix, MergePlan> causal_merge(const TokenMatrix& x, std::size_t r, std::size_t q, Metric metric);

/// Clones every token back onto each original position it covers, so the
/// result has original_length() tokens of size 1. Orphaned positions take the
/// value of the token owning their anchor.
TokenMatrix unmerge(const TokenMatrix& x);

}  // namespace tsmerge
