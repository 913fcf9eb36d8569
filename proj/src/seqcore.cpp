// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/seqcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsmerge/error.hpp"

namespace tsmerge {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : m_rows(rows),
      m_cols(cols),
      m_data(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : m_rows(rows),
      m_cols(cols),
      m_data(std::move(data)) {
    if (m_data.size() != rows * cols) {
        throw Error(ErrorCode::shape,
                    "matrix data has " + std::to_string(m_data.size()) + " values, expected " +
                        std::to_string(rows * cols));
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix out(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            throw Error(ErrorCode::shape, "ragged row " + std::to_string(r));
        }
        std::copy(rows[r].begin(), rows[r].end(), out.row(r).begin());
    }
    return out;
}

namespace {

std::vector<std::vector<Span>> unit_origins(std::size_t t) {
    std::vector<std::vector<Span>> origins(t);
    for (std::size_t i = 0; i < t; ++i) {
        origins[i] = {Span{i, i}};
    }
    return origins;
}

}  // namespace

TokenMatrix::TokenMatrix(Matrix values) : TokenMatrix(values, unit_origins(values.rows()), values.rows()) {}

TokenMatrix::TokenMatrix(Matrix values,
                         std::vector<std::vector<Span>> origins,
                         std::size_t original_length,
                         std::vector<Orphan> orphans)
    : m_values(std::move(values)),
      m_origins(std::move(origins)),
      m_original_length(original_length),
      m_orphans(std::move(orphans)) {
    if (m_values.rows() == 0) {
        throw Error(ErrorCode::empty_sequence, "token matrix needs at least one token");
    }
    m_sizes.resize(m_origins.size());
    for (std::size_t i = 0; i < m_origins.size(); ++i) {
        std::size_t total = 0;
        for (const Span& s : m_origins[i]) {
            total += s.hi >= s.lo ? s.width() : 0;
        }
        m_sizes[i] = total;
    }
    validate();
}

TokenMatrix TokenMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    return TokenMatrix(Matrix::from_rows(rows));
}

Span TokenMatrix::span(std::size_t i) const {
    return Span{m_origins[i].front().lo, m_origins[i].back().hi};
}

TokenMatrix TokenMatrix::with_values(Matrix values) const {
    if (values.rows() != length()) {
        throw Error(ErrorCode::shape,
                    "with_values: " + std::to_string(values.rows()) + " rows for " + std::to_string(length()) +
                        " tokens");
    }
    TokenMatrix out = *this;
    out.m_values = std::move(values);
    if (out.m_values.cols() == 0) {
        throw Error(ErrorCode::shape, "token dimension must be positive");
    }
    return out;
}

void TokenMatrix::validate() const {
    const auto fail = [](const std::string& what) {
        throw Error(ErrorCode::corruption, what);
    };
    const std::size_t t = m_values.rows();
    if (t == 0) {
        throw Error(ErrorCode::empty_sequence, "token matrix needs at least one token");
    }
    if (m_values.cols() == 0) {
        fail("token dimension must be positive");
    }
    if (m_origins.size() != t || m_sizes.size() != t) {
        fail("provenance has " + std::to_string(m_origins.size()) + " entries for " + std::to_string(t) + " tokens");
    }
    std::vector<char> owner(m_original_length, 0);
    const auto claim = [&](std::size_t pos, char who) {
        if (pos >= m_original_length) {
            fail("position " + std::to_string(pos) + " beyond original length " + std::to_string(m_original_length));
        }
        if (owner[pos] != 0) {
            fail("position " + std::to_string(pos) + " claimed twice");
        }
        owner[pos] = who;
    };
    std::size_t previous_lo = 0;
    std::size_t covered = 0;
    for (std::size_t i = 0; i < t; ++i) {
        const auto& segments = m_origins[i];
        if (segments.empty()) {
            fail("token " + std::to_string(i) + " has no origin");
        }
        std::size_t width = 0;
        for (std::size_t s = 0; s < segments.size(); ++s) {
            const Span& seg = segments[s];
            if (seg.hi < seg.lo) {
                fail("token " + std::to_string(i) + " has an inverted span");
            }
            if (s > 0 && seg.lo <= segments[s - 1].hi + 1) {
                fail("token " + std::to_string(i) + " has unsorted or uncoalesced segments");
            }
            for (std::size_t p = seg.lo; p <= seg.hi; ++p) {
                claim(p, 1);
            }
            width += seg.width();
        }
        if (width != m_sizes[i] || m_sizes[i] == 0) {
            fail("token " + std::to_string(i) + " size " + std::to_string(m_sizes[i]) + " != span width " +
                 std::to_string(width));
        }
        if (i > 0 && segments.front().lo <= previous_lo) {
            fail("tokens out of sequence order at " + std::to_string(i));
        }
        previous_lo = segments.front().lo;
        covered += width;
    }
    for (const Orphan& o : m_orphans) {
        claim(o.position, 2);
    }
    for (const Orphan& o : m_orphans) {
        if (o.anchor >= m_original_length || owner[o.anchor] != 1) {
            fail("orphan " + std::to_string(o.position) + " anchored to an unowned position");
        }
    }
    if (covered + m_orphans.size() != m_original_length) {
        fail("sizes sum to " + std::to_string(covered) + " (+" + std::to_string(m_orphans.size()) +
             " orphans), original length is " + std::to_string(m_original_length));
    }
}

std::string_view to_string(Metric metric) {
    switch (metric) {
    case Metric::cosine:
        return "cosine";
    case Metric::l1:
        return "l1";
    case Metric::l2:
        return "l2";
    }
    return "cosine";
}

Metric metric_from_string(std::string_view name) {
    if (name == "cosine") {
        return Metric::cosine;
    }
    if (name == "l1" || name == "L1") {
        return Metric::l1;
    }
    if (name == "l2" || name == "L2") {
        return Metric::l2;
    }
    throw Error(ErrorCode::parameter, "unknown metric '" + std::string(name) + "'");
}

Compaction compact(std::size_t t, const MergePlan& plan) {
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> target(t, none);  // source -> destination
    std::vector<char> is_destination(t, 0);
    for (const MergeEdge& e : plan.edges) {
        if (e.a >= t || e.b >= t) {
            throw Error(ErrorCode::plan_mismatch,
                        "edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) + ") out of range for " +
                            std::to_string(t) + " tokens");
        }
        if (e.a == e.b) {
            throw Error(ErrorCode::invalid_plan, "edge merges token " + std::to_string(e.a) + " with itself");
        }
        if (target[e.a] != none) {
            throw Error(ErrorCode::invalid_plan, "token " + std::to_string(e.a) + " is a source twice");
        }
        target[e.a] = e.b;
        is_destination[e.b] = 1;
    }
    for (std::size_t i = 0; i < t; ++i) {
        if (target[i] != none && is_destination[i]) {
            throw Error(ErrorCode::invalid_plan, "token " + std::to_string(i) + " is both source and destination");
        }
    }

    // root of each token: its destination if it is a source, else itself
    std::vector<std::size_t> root(t);
    for (std::size_t i = 0; i < t; ++i) {
        root[i] = target[i] == none ? i : target[i];
    }
    std::vector<std::size_t> group_slot(t, none);
    for (std::size_t i = 0; i < t; ++i) {
        if (group_slot[root[i]] == none) {
            group_slot[root[i]] = i;  // ascending scan, so first hit is the earliest member
        }
    }

    Compaction out;
    out.new_index.assign(t, none);
    out.slot.assign(t, none);
    for (std::size_t i = 0; i < t; ++i) {
        const std::size_t slot = group_slot[root[i]];
        out.slot[i] = slot;
        if (slot == i) {
            out.new_index[i] = out.output_length++;
            out.groups.push_back({i});
        } else {
            out.new_index[i] = out.new_index[slot];
            out.groups[out.new_index[i]].push_back(i);
        }
    }
    return out;
}

MergeTrace MergeTrace::identity(std::size_t original_length) {
    MergeTrace trace;
    trace.final_map.resize(original_length);
    std::iota(trace.final_map.begin(), trace.final_map.end(), std::size_t{0});
    return trace;
}

std::size_t MergeTrace::surviving() const {
    if (final_map.empty()) {
        return 0;
    }
    return *std::max_element(final_map.begin(), final_map.end()) + 1;
}

namespace {

MergeTrace compose(const MergeTrace& trace, const MergePlan& plan, bool pruned) {
    const Compaction c = compact(trace.surviving(), plan);
    MergeTrace out = trace;
    out.layers.push_back(plan);
    for (std::size_t pos = 0; pos < out.final_map.size(); ++pos) {
        const std::size_t current = trace.final_map[pos];
        if (pruned && c.slot[current] != current) {
            out.orphaned.push_back(pos);
        }
        out.final_map[pos] = c.new_index[current];
    }
    std::sort(out.orphaned.begin(), out.orphaned.end());
    out.orphaned.erase(std::unique(out.orphaned.begin(), out.orphaned.end()), out.orphaned.end());
    return out;
}

}  // namespace

MergeTrace trace_compose(const MergeTrace& trace, const MergePlan& plan) {
    return compose(trace, plan, false);
}

MergeTrace trace_compose_pruned(const MergeTrace& trace, const MergePlan& plan) {
    return compose(trace, plan, true);
}

nlohmann::json trace_to_json(const MergeTrace& trace) {
    nlohmann::json layers = nlohmann::json::array();
    for (const MergePlan& plan : trace.layers) {
        nlohmann::json edges = nlohmann::json::array();
        for (const MergeEdge& e : plan.edges) {
            edges.push_back({e.a, e.b, e.similarity});
        }
        layers.push_back({{"edges", std::move(edges)}, {"k", plan.k}, {"r", plan.r()}});
    }
    nlohmann::json j = {{"layers", std::move(layers)}, {"final_map", trace.final_map}};
    if (!trace.orphaned.empty()) {
        j["orphaned"] = trace.orphaned;
    }
    return j;
}

MergeTrace trace_from_json(const nlohmann::json& j) {
    try {
        MergeTrace trace;
        for (const auto& layer : j.at("layers")) {
            MergePlan plan;
            plan.k = layer.at("k").get<std::size_t>();
            for (const auto& e : layer.at("edges")) {
                plan.edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<double>()});
            }
            if (layer.at("r").get<std::size_t>() != plan.edges.size()) {
                throw Error(ErrorCode::corruption, "layer r disagrees with edge count");
            }
            plan.requested_r = plan.edges.size();
            trace.layers.push_back(std::move(plan));
        }
        trace.final_map = j.at("final_map").get<std::vector<std::size_t>>();
        if (j.contains("orphaned")) {
            trace.orphaned = j.at("orphaned").get<std::vector<std::size_t>>();
        }
        return trace;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::corruption, std::string("malformed trace: ") + e.what());
    }
}

void LayerSchedule::validate() const {
    if (k == 0) {
        throw Error(ErrorCode::schedule, "k must be positive");
    }
    if (q == 0) {
        throw Error(ErrorCode::schedule, "q must be positive");
    }
    if (mode == ScheduleMode::dynamic && !std::isfinite(tau)) {
        throw Error(ErrorCode::schedule, "tau must be finite");
    }
}

Partition partition(std::size_t t) {
    if (t == 0) {
        throw Error(ErrorCode::empty_sequence, "cannot partition an empty sequence");
    }
    Partition p;
    const std::size_t half = t / 2;
    p.a.reserve(half);
    p.b.reserve(half);
    for (std::size_t i = 0; i < half; ++i) {
        p.a.push_back(2 * i);
        p.b.push_back(2 * i + 1);
    }
    if (t % 2 == 1) {
        p.excluded = t - 1;
    }
    return p;
}

Partition partition(const TokenMatrix& x) {
    return partition(x.length());
}

}  // namespace tsmerge
