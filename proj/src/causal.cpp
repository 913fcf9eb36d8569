// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/causal.hpp"

#include <algorithm>
#include <string>

#include "tsmerge/error.hpp"
#include "tsmerge/merge.hpp"

namespace tsmerge {

std::pair<TokenMatrix, MergePlan> causal_merge(const TokenMatrix& x, std::size_t r, std::size_t q, Metric metric) {
    if (x.length() < 2 || r == 0) {
        MergePlan plan;
        plan.requested_r = r;
        return {x, plan};
    }
    const BandSimilarity s = similarity_banded(x, partition(x), 1, metric);
    MergePlan plan = select_top_r(s, r, q, x.length());
    return {merge_apply(x, plan), std::move(plan)};
}

TokenMatrix unmerge(const TokenMatrix& x) {
    x.validate();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    const std::size_t n = x.original_length();
    std::vector<std::size_t> owner(n, none);
    for (std::size_t i = 0; i < x.length(); ++i) {
        for (const Span& s : x.origin(i)) {
            std::fill(owner.begin() + static_cast<std::ptrdiff_t>(s.lo), owner.begin() + static_cast<std::ptrdiff_t>(s.hi) + 1,
                      i);
        }
    }
    for (const Orphan& o : x.orphans()) {
        owner[o.position] = owner[o.anchor];
    }
    Matrix values(n, x.dim());
    for (std::size_t p = 0; p < n; ++p) {
        if (owner[p] == none) {
            throw Error(ErrorCode::corruption, "position " + std::to_string(p) + " has no owning token");
        }
        const auto tok = x.token(owner[p]);
        std::copy(tok.begin(), tok.end(), values.row(p).begin());
    }
    return TokenMatrix(std::move(values));
}

}  // namespace tsmerge
