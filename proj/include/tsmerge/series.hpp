// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tsmerge {

/// m time stamps by n variates, stored column-major.
struct Series {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<double> values;
    std::vector<std::string> names;

    Series() = default;
    Series(std::size_t rows, std::size_t variates)
        : m(rows),
          n(variates),
          values(rows * variates, 0.0) {}

    double& operator()(std::size_t i, std::size_t c) {
        return values[c * m + i];
    }
    double operator()(std::size_t i, std::size_t c) const {
        return values[c * m + i];
    }
    std::span<const double> column(std::size_t c) const {
        return {values.data() + c * m, m};
    }

    /// First `rows` time stamps.
    Series head(std::size_t rows) const;
};

/// Reads a comma-separated file with a header row. The first column is a
/// timestamp or index and is skipped; every other cell must be a finite number.
/// Throws ErrorCode::ingestion naming the offending row and column.
Series ingest_csv(const std::filesystem::path& path);
Series parse_csv(const std::string& text, const std::string& source = "<memory>");

}  // namespace tsmerge
