// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tsmerge/models.hpp"
#include "tsmerge/series.hpp"
#include "tsmerge/signals.hpp"

namespace tsmerge {

/// Inclusive range "first:last:step" (step defaults to 1).
struct SweepRange {
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t step = 1;

    static SweepRange parse(std::string_view text);
    std::vector<std::size_t> values() const;
};

/// Command-line overrides applied to every encoder layer of a config.
struct ScheduleOverrides {
    std::optional<std::size_t> r;
    std::optional<double> tau;
    std::optional<std::size_t> k;
    std::optional<std::size_t> q;
    std::optional<Metric> metric;
    std::optional<std::uint64_t> seed;

    void apply(ModelConfig& config) const;
};

struct BenchOptions {
    std::filesystem::path config_path;
    std::filesystem::path data_path;
    std::filesystem::path out_path;
    std::optional<SweepRange> r_sweep;
    ScheduleOverrides overrides;
};

/// Runs the configured model once per sweep point and writes the JSON report
/// to out_path plus one merge trace per point under "<stem>_traces/".
/// Returns the report.
nlohmann::json bench_run(const BenchOptions& options);

struct TraceOptions {
    std::filesystem::path config_path;
    std::filesystem::path data_path;
    std::filesystem::path out_path;
    ScheduleOverrides overrides;
};

/// One forward pass; writes its merge trace to out_path.
nlohmann::json trace_run(const TraceOptions& options);

struct AnalyzeRunOptions {
    std::filesystem::path data_path;
    std::filesystem::path out_path;
    AnalyzeOptions signal;
};

/// Signal report per variate plus their mean, written to out_path, and a
/// plot-ready "<stem>_redundancy.csv" (variate,threshold,fraction).
nlohmann::json analyze_run(const AnalyzeRunOptions& options);

/// Prepares the model input: first m rows of the data, tokenized per config.
TokenMatrix model_input(const ModelConfig& config, const Series& data);

}  // namespace tsmerge
