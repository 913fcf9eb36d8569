// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsmerge/seqcore.hpp"

namespace tsmerge {

/// Similarity score where larger means more similar for every metric: cosine
/// similarity (0 if either vector has zero norm), or the negated L1 / L2 distance.
double similarity(std::span<const double> u, std::span<const double> v, Metric metric);

/// Banded A x B similarity, stored as a rectangular |A| x (2k-1) block.
///
/// Column c of row i holds s(i, j) with j = i + c - (k - 1); cells with j
/// outside [0, |A|) are never evaluated.
struct BandSimilarity {
    Partition subsets;
    std::size_t k = 1;
    Metric metric = Metric::cosine;
    std::vector<double> scores;
    std::size_t evaluations = 0;

    std::size_t half() const noexcept {
        return subsets.a.size();
    }
    std::size_t width() const noexcept {
        return 2 * k - 1;
    }
    bool in_band(std::size_t i, std::size_t j) const noexcept {
        return i < half() && j < half() && (i > j ? i - j : j - i) < k;
    }
    /// Requires in_band(i, j).
    double at(std::size_t i, std::size_t j) const {
        return scores[i * width() + (j + k - 1 - i)];
    }
};

/// Requires 1 <= k <= |A|; throws ErrorCode::parameter otherwise.
BandSimilarity similarity_banded(const TokenMatrix& x, const Partition& subsets, std::size_t k, Metric metric);

/// One proposal per A token: its most similar in-band B partner (lower B index
/// on ties). Edges are in sequence coordinates, ordered by A index.
std::vector<MergeEdge> best_per_a(const BandSimilarity& s);

/// Takes the r highest-similarity proposals from best_per_a, ties broken by
/// lower A then lower B index. r is clipped so that at least q of the t tokens
/// survive; plan.requested_r keeps the original request.
MergePlan select_top_r(const BandSimilarity& s, std::size_t r, std::size_t q, std::size_t t);

/// Replaces each merge group by its size-weighted mean, placed at the group's
/// earliest position. Sizes add up and origins are unioned.
TokenMatrix merge_apply(const TokenMatrix& x, const MergePlan& plan);

/// Same plan, but only the group member at the destination slot survives,
/// unchanged. Every other member's positions become orphans of the survivor.
TokenMatrix prune_apply(const TokenMatrix& x, const MergePlan& plan);

/// Per-element count of proposals with similarity >= tau, averaged over the
/// batch, rounded half to even and clipped to [0, t - q].
std::size_t dynamic_r(std::span<const TokenMatrix> batch, double tau, std::size_t k, std::size_t q, Metric metric);

/// Similarity selection shared by the models: plan for one layer of `schedule`.
/// Returns an empty plan when t < 2.
MergePlan plan_layer(const TokenMatrix& x, const LayerSchedule& schedule, std::size_t* evaluations = nullptr);

}  // namespace tsmerge
