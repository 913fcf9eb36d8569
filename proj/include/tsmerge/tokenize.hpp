// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "tsmerge/seqcore.hpp"
#include "tsmerge/series.hpp"

namespace tsmerge {

/// Sinusoidal position embedding, t x d.
Matrix positional_embedding(std::size_t t, std::size_t d);

/// One token per time stamp: a fixed random n -> d projection plus the
/// position embedding.
TokenMatrix tokenize_timestep(const Series& u, std::size_t d, std::uint64_t seed);

/// One token per non-overlapping patch of `patch_len` time stamps, each patch
/// flattened and projected (patch_len * n -> d), plus the position embedding.
/// Throws ErrorCode::shape unless patch_len divides m.
TokenMatrix tokenize_patch(const Series& u, std::size_t patch_len, std::size_t d, std::uint64_t seed);

}  // namespace tsmerge
