// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tsmerge/error.hpp"

namespace tsmerge {

Series Series::head(std::size_t rows) const {
    if (rows > m) {
        throw Error(ErrorCode::shape,
                    "requested " + std::to_string(rows) + " time stamps, series has " + std::to_string(m));
    }
    Series out(rows, n);
    out.names = names;
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < rows; ++i) {
            out(i, c) = (*this)(i, c);
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

Series parse_csv(const std::string& text, const std::string& source) {
    const auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::ingestion, source + ": " + what);
    };
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_line(line);
            break;
        }
    }
    if (header.empty()) {
        fail("empty file");
    }
    if (header.size() < 2) {
        fail("header has no data columns");
    }
    const std::size_t n = header.size() - 1;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_line(line);
        if (cells.size() != header.size()) {
            fail("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) + " cells, header has " +
                 std::to_string(header.size()));
        }
        std::vector<double> row(n);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const std::string cell = trim(cells[c]);
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
                fail("row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) + " ('" +
                     trim(header[c]) + "'): '" + cell + "' is not a finite number");
            }
            row[c - 1] = value;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        fail("no data rows after the header");
    }
    Series out(rows.size(), n);
    for (std::size_t c = 0; c < n; ++c) {
        out.names.push_back(trim(header[c + 1]));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out(i, c) = rows[i][c];
        }
    }
    return out;
}

Series ingest_csv(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw Error(ErrorCode::ingestion, path.string() + ": cannot open file");
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_csv(buffer.str(), path.string());
}

}  // namespace tsmerge
