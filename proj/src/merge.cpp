// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tsmerge/error.hpp"

namespace tsmerge {

double similarity(std::span<const double> u, std::span<const double> v, Metric metric) {
    const std::size_t d = std::min(u.size(), v.size());
    switch (metric) {
    case Metric::cosine: {
        double dot = 0.0;
        double nu = 0.0;
        double nv = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            dot += u[c] * v[c];
            nu += u[c] * u[c];
            nv += v[c] * v[c];
        }
        if (nu == 0.0 || nv == 0.0) {
            return 0.0;
        }
        return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
    }
    case Metric::l1: {
        double sum = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            sum += std::abs(u[c] - v[c]);
        }
        return -sum;
    }
    case Metric::l2: {
        double sum = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = u[c] - v[c];
            sum += diff * diff;
        }
        return -std::sqrt(sum);
    }
    }
    return 0.0;
}

BandSimilarity similarity_banded(const TokenMatrix& x, const Partition& subsets, std::size_t k, Metric metric) {
    const std::size_t half = subsets.a.size();
    if (subsets.b.size() != half) {
        throw Error(ErrorCode::parameter, "A and B subsets differ in size");
    }
    if (k < 1 || k > half) {
        throw Error(ErrorCode::parameter,
                    "locality k=" + std::to_string(k) + " outside [1, " + std::to_string(half) + "]");
    }
    BandSimilarity s;
    s.subsets = subsets;
    s.k = k;
    s.metric = metric;
    s.scores.assign(half * s.width(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < half; ++i) {
        const std::size_t j_lo = i >= k - 1 ? i - (k - 1) : 0;
        const std::size_t j_hi = std::min(half - 1, i + (k - 1));
        const auto a = x.token(subsets.a[i]);
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            s.scores[i * s.width() + (j + k - 1 - i)] = similarity(a, x.token(subsets.b[j]), metric);
            ++s.evaluations;
        }
    }
    return s;
}

std::vector<MergeEdge> best_per_a(const BandSimilarity& s) {
    std::vector<MergeEdge> proposals;
    proposals.reserve(s.half());
    for (std::size_t i = 0; i < s.half(); ++i) {
        const std::size_t j_lo = i >= s.k - 1 ? i - (s.k - 1) : 0;
        const std::size_t j_hi = std::min(s.half() - 1, i + (s.k - 1));
        std::size_t best = j_lo;
        for (std::size_t j = j_lo + 1; j <= j_hi; ++j) {
            if (s.at(i, j) > s.at(i, best)) {
                best = j;
            }
        }
        proposals.push_back({s.subsets.a[i], s.subsets.b[best], s.at(i, best)});
    }
    return proposals;
}

MergePlan select_top_r(const BandSimilarity& s, std::size_t r, std::size_t q, std::size_t t) {
    MergePlan plan;
    plan.k = s.k;
    plan.requested_r = r;
    const std::size_t budget = std::min(r, t > q ? t - q : 0);
    if (budget == 0 || s.half() == 0) {
        return plan;
    }
    std::vector<MergeEdge> proposals = best_per_a(s);
    std::stable_sort(proposals.begin(), proposals.end(), [](const MergeEdge& lhs, const MergeEdge& rhs) {
        if (lhs.similarity != rhs.similarity) {
            return lhs.similarity > rhs.similarity;
        }
        if (lhs.a != rhs.a) {
            return lhs.a < rhs.a;
        }
        return lhs.b < rhs.b;
    });
    proposals.resize(std::min(budget, proposals.size()));
    plan.edges = std::move(proposals);
    return plan;
}

namespace {

std::vector<Span> union_segments(const TokenMatrix& x, const std::vector<std::size_t>& members) {
    std::vector<Span> all;
    for (std::size_t m : members) {
        const auto& segs = x.origin(m);
        all.insert(all.end(), segs.begin(), segs.end());
    }
    std::sort(all.begin(), all.end(), [](const Span& l, const Span& r) {
        return l.lo < r.lo;
    });
    std::vector<Span> out;
    for (const Span& s : all) {
        if (!out.empty() && s.lo == out.back().hi + 1) {
            out.back().hi = s.hi;
        } else {
            out.push_back(s);
        }
    }
    return out;
}

}  // namespace

TokenMatrix merge_apply(const TokenMatrix& x, const MergePlan& plan) {
    if (plan.edges.empty()) {
        return x;
    }
    const Compaction c = compact(x.length(), plan);
    const std::size_t d = x.dim();
    Matrix values(c.output_length, d);
    std::vector<std::vector<Span>> origins(c.output_length);
    for (std::size_t g = 0; g < c.output_length; ++g) {
        const auto& members = c.groups[g];
        const std::size_t ref = members.front();
        auto out = values.row(g);
        const auto base = x.token(ref);
        std::copy(base.begin(), base.end(), out.begin());
        if (members.size() > 1) {
            double total = 0.0;
            for (std::size_t m : members) {
                total += static_cast<double>(x.size(m));
            }
            // Mean written as ref + sum w (x_m - ref): exact when all members are equal.
            for (std::size_t idx = 1; idx < members.size(); ++idx) {
                const std::size_t m = members[idx];
                const double w = static_cast<double>(x.size(m)) / total;
                const auto tok = x.token(m);
                for (std::size_t col = 0; col < d; ++col) {
                    out[col] += w * (tok[col] - base[col]);
                }
            }
        }
        origins[g] = union_segments(x, members);
    }
    return TokenMatrix(std::move(values), std::move(origins), x.original_length(), x.orphans());
}

TokenMatrix prune_apply(const TokenMatrix& x, const MergePlan& plan) {
    if (plan.edges.empty()) {
        return x;
    }
    const Compaction c = compact(x.length(), plan);
    Matrix values(c.output_length, x.dim());
    std::vector<std::vector<Span>> origins(c.output_length);
    std::vector<Orphan> orphans = x.orphans();
    // original position -> surviving old token that now hosts it
    std::vector<std::size_t> host(x.original_length(), static_cast<std::size_t>(-1));
    for (std::size_t g = 0; g < c.output_length; ++g) {
        const auto& members = c.groups[g];
        const std::size_t survivor = members.front();
        const auto tok = x.token(survivor);
        std::copy(tok.begin(), tok.end(), values.row(g).begin());
        origins[g] = x.origin(survivor);
        const std::size_t anchor = x.origin(survivor).front().lo;
        for (std::size_t idx = 1; idx < members.size(); ++idx) {
            for (const Span& s : x.origin(members[idx])) {
                for (std::size_t p = s.lo; p <= s.hi; ++p) {
                    orphans.push_back({p, anchor});
                    host[p] = survivor;
                }
            }
        }
    }
    // Earlier orphans anchored inside a dropped token follow it to the new anchor.
    for (Orphan& o : orphans) {
        if (host[o.anchor] != static_cast<std::size_t>(-1)) {
            o.anchor = x.origin(host[o.anchor]).front().lo;
        }
    }
    std::sort(orphans.begin(), orphans.end(), [](const Orphan& l, const Orphan& r) {
        return l.position < r.position;
    });
    return TokenMatrix(std::move(values), std::move(origins), x.original_length(), std::move(orphans));
}

std::size_t dynamic_r(std::span<const TokenMatrix> batch, double tau, std::size_t k, std::size_t q, Metric metric) {
    if (batch.empty()) {
        throw Error(ErrorCode::batch_shape, "dynamic merging needs a non-empty batch");
    }
    const std::size_t t = batch.front().length();
    const std::size_t d = batch.front().dim();
    for (const TokenMatrix& x : batch) {
        if (x.length() != t || x.dim() != d) {
            throw Error(ErrorCode::batch_shape,
                        "batch mixes shapes " + std::to_string(t) + "x" + std::to_string(d) + " and " +
                            std::to_string(x.length()) + "x" + std::to_string(x.dim()));
        }
    }
    if (t < 2) {
        return 0;
    }
    const Partition subsets = partition(t);
    double total = 0.0;
    for (const TokenMatrix& x : batch) {
        const BandSimilarity s = similarity_banded(x, subsets, k, metric);
        std::size_t passing = 0;
        for (const MergeEdge& e : best_per_a(s)) {
            if (e.similarity >= tau) {
                ++passing;
            }
        }
        total += static_cast<double>(passing);
    }
    // nearbyint under the default FE_TONEAREST mode rounds half to even
    const double mean = std::nearbyint(total / static_cast<double>(batch.size()));
    const std::size_t ceiling = t > q ? t - q : 0;
    return std::min(static_cast<std::size_t>(mean), ceiling);
}

MergePlan plan_layer(const TokenMatrix& x, const LayerSchedule& schedule, std::size_t* evaluations) {
    const std::size_t t = x.length();
    if (evaluations != nullptr) {
        *evaluations = 0;
    }
    if (t < 2) {
        MergePlan plan;
        plan.k = schedule.k;
        plan.requested_r = schedule.mode == ScheduleMode::fixed ? schedule.r : 0;
        return plan;
    }
    const bool idle = schedule.mode == ScheduleMode::fixed && (schedule.r == 0 || t <= schedule.q);
    if (idle) {
        MergePlan plan;
        plan.k = schedule.k;
        plan.requested_r = schedule.r;
        return plan;
    }
    if (schedule.k > t / 2) {
        throw Error(ErrorCode::schedule,
                    "k=" + std::to_string(schedule.k) + " exceeds floor(t/2)=" + std::to_string(t / 2) +
                        " at t=" + std::to_string(t));
    }
    std::size_t r = schedule.r;
    if (schedule.mode == ScheduleMode::dynamic) {
        r = dynamic_r(std::span<const TokenMatrix>(&x, 1), schedule.tau, schedule.k, schedule.q, schedule.metric);
    }
    const BandSimilarity s = similarity_banded(x, partition(t), schedule.k, schedule.metric);
    if (evaluations != nullptr) {
        *evaluations = s.evaluations;
    }
    return select_top_r(s, r, schedule.q, t);
}

}  // namespace tsmerge
