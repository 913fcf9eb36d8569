// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tsmerge {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept {
        return m_rows;
    }
    std::size_t cols() const noexcept {
        return m_cols;
    }

    double& operator()(std::size_t r, std::size_t c) {
        return m_data[r * m_cols + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        return m_data[r * m_cols + c];
    }

    std::span<double> row(std::size_t r) {
        return {m_data.data() + r * m_cols, m_cols};
    }
    std::span<const double> row(std::size_t r) const {
        return {m_data.data() + r * m_cols, m_cols};
    }

    const std::vector<double>& data() const noexcept {
        return m_data;
    }
    std::vector<double>& data() noexcept {
        return m_data;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t m_rows = 0;
    std::size_t m_cols = 0;
    std::vector<double> m_data;
};

/// Closed interval [lo, hi] of original sequence positions.
struct Span {
    std::size_t lo = 0;
    std::size_t hi = 0;

    std::size_t width() const noexcept {
        return hi - lo + 1;
    }
    bool operator==(const Span&) const = default;
};

/// A position removed by pruning. `anchor` is an original position still owned
/// by a surviving token; unmerging copies that token's value into `position`.
struct Orphan {
    std::size_t position = 0;
    std::size_t anchor = 0;

    bool operator==(const Orphan&) const = default;
};

/// Ordered token sequence with provenance.
///
/// Every token owns a sorted list of disjoint original-position segments; its
/// size is the number of positions it absorbed. Merges with k=1 keep a single
/// segment per token, wider bands can produce several. Tokens are ordered by
/// their first original position. Segments and orphans together partition
/// [0, original_length).
class TokenMatrix {
public:
    /// Fresh sequence: token i has size 1 and span [i, i].
    explicit TokenMatrix(Matrix values);

    TokenMatrix(Matrix values,
                std::vector<std::vector<Span>> origins,
                std::size_t original_length,
                std::vector<Orphan> orphans = {});

    static TokenMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t length() const noexcept {
        return m_values.rows();
    }
    std::size_t dim() const noexcept {
        return m_values.cols();
    }
    std::size_t original_length() const noexcept {
        return m_original_length;
    }

    const Matrix& values() const noexcept {
        return m_values;
    }
    std::span<const double> token(std::size_t i) const {
        return m_values.row(i);
    }

    const std::vector<std::size_t>& sizes() const noexcept {
        return m_sizes;
    }
    std::size_t size(std::size_t i) const {
        return m_sizes[i];
    }

    const std::vector<Span>& origin(std::size_t i) const {
        return m_origins[i];
    }
    const std::vector<std::vector<Span>>& origins() const noexcept {
        return m_origins;
    }
    const std::vector<Orphan>& orphans() const noexcept {
        return m_orphans;
    }

    /// Hull of token i's origin segments.
    Span span(std::size_t i) const;
    bool contiguous(std::size_t i) const {
        return m_origins[i].size() == 1;
    }

    /// Same provenance, new per-token values. Row count must match.
    TokenMatrix with_values(Matrix values) const;

    /// Re-checks every provenance invariant; throws ErrorCode::corruption.
    void validate() const;

    bool operator==(const TokenMatrix&) const = default;

private:
    Matrix m_values;
    std::vector<std::vector<Span>> m_origins;
    std::vector<std::size_t> m_sizes;
    std::size_t m_original_length = 0;
    std::vector<Orphan> m_orphans;
};

enum class Metric { cosine, l1, l2 };

std::string_view to_string(Metric metric);
Metric metric_from_string(std::string_view name);

struct MergeEdge {
    std::size_t a = 0;  // source, position in the current sequence
    std::size_t b = 0;  // destination partner, position in the current sequence
    double similarity = 0.0;

    bool operator==(const MergeEdge&) const = default;
};

enum class DestinationRule { earliest };

/// Merge correspondences selected for one layer.
struct MergePlan {
    std::vector<MergeEdge> edges;
    std::size_t k = 1;
    std::size_t requested_r = 0;
    DestinationRule destination = DestinationRule::earliest;

    std::size_t r() const noexcept {
        return edges.size();
    }
    bool clipped() const noexcept {
        return requested_r > edges.size();
    }
    bool operator==(const MergePlan&) const = default;
};

/// How a plan rewrites a sequence of `t` tokens.
///
/// Edges sharing a destination form one group; the group lands in the slot of
/// its earliest member. `new_index[i]` is the output index of old token i (all
/// members of a group share it), `slot[i]` is the old index of the group slot.
struct Compaction {
    std::vector<std::size_t> new_index;
    std::vector<std::size_t> slot;
    std::vector<std::vector<std::size_t>> groups;  // per output token, old members ascending
    std::size_t output_length = 0;
};

/// Throws ErrorCode::plan_mismatch for out-of-range indices and
/// ErrorCode::invalid_plan for overlapping edges.
Compaction compact(std::size_t t, const MergePlan& plan);

struct MergeTrace {
    std::vector<MergePlan> layers;
    std::vector<std::size_t> final_map;  // original position -> surviving token
    std::vector<std::size_t> orphaned;   // original positions dropped by pruning, ascending

    static MergeTrace identity(std::size_t original_length);

    std::size_t surviving() const;
    bool operator==(const MergeTrace&) const = default;
};

MergeTrace trace_compose(const MergeTrace& trace, const MergePlan& plan);

/// Like trace_compose, but every non-slot group member is recorded as orphaned.
MergeTrace trace_compose_pruned(const MergeTrace& trace, const MergePlan& plan);

nlohmann::json trace_to_json(const MergeTrace& trace);
MergeTrace trace_from_json(const nlohmann::json& j);

enum class ScheduleMode { fixed, dynamic };
enum class Reduction { merge, prune };

struct LayerSchedule {
    ScheduleMode mode = ScheduleMode::fixed;
    std::size_t r = 0;
    double tau = 1.0;
    std::size_t k = 1;
    std::size_t q = 1;
    Metric metric = Metric::cosine;
    Reduction reduction = Reduction::merge;

    /// Static checks; throws ErrorCode::schedule.
    void validate() const;
};

struct Partition {
    std::vector<std::size_t> a;
    std::vector<std::size_t> b;
    std::optional<std::size_t> excluded;
};

/// Alternating split: A takes even positions, B odd positions, over the first
/// 2*floor(t/2) tokens. For odd t the most recent token is left out.
Partition partition(std::size_t t);
Partition partition(const TokenMatrix& x);

}  // namespace tsmerge
