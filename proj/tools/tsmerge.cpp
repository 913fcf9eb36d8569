// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsmerge/bench.hpp"
#include "tsmerge/error.hpp"
#include "tsmerge/series.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

int exit_code_for(tsmerge::ErrorCode code) {
    using tsmerge::ErrorCode;
    switch (code) {
    case ErrorCode::config:
    case ErrorCode::parameter:
    case ErrorCode::schedule:
    case ErrorCode::contract_violation:
        return kExitConfig;
    case ErrorCode::ingestion:
    case ErrorCode::shape:
    case ErrorCode::empty_sequence:
    case ErrorCode::batch_shape:
        return kExitData;
    default:
        return kExitInternal;
    }
}

int report_error(int exit_code, std::string_view kind, const std::string& message) {
    const nlohmann::json j = {{"error", {{"code", exit_code}, {"kind", kind}, {"message", message}}}};
    std::cerr << j.dump() << '\n';
    return exit_code;
}

struct Flags {
    std::string config;
    std::string data;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> r_sweep;
    std::optional<std::size_t> r;
    std::optional<double> tau;
    std::optional<std::size_t> k;
    std::optional<std::size_t> q;
    std::optional<std::string> metric;
    double sigma = 2.0;
};

void add_schedule_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--seed", flags.seed, "Override the config seed");
    cmd->add_option("--tau", flags.tau, "Dynamic merging: similarity threshold for every layer");
    cmd->add_option("--k", flags.k, "Locality bound for every layer");
    cmd->add_option("--q", flags.q, "Minimum number of surviving tokens");
    cmd->add_option("--metric", flags.metric, "Similarity metric: cosine, l1 or l2");
}

tsmerge::ScheduleOverrides overrides_from(const Flags& flags) {
    tsmerge::ScheduleOverrides o;
    o.seed = flags.seed;
    o.r = flags.r;
    o.tau = flags.tau;
    o.k = flags.k;
    o.q = flags.q;
    if (flags.metric) {
        try {
            o.metric = tsmerge::metric_from_string(*flags.metric);
        } catch (const tsmerge::Error& e) {
            throw tsmerge::Error(tsmerge::ErrorCode::config, e.what());
        }
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Token merging toolkit for sequence models"};
    app.require_subcommand(1);
    Flags flags;

    auto* bench = app.add_subcommand("bench", "Sweep merging rates and report FLOPs and output deltas");
    bench->add_option("--config", flags.config, "Model config (JSON)")->required();
    bench->add_option("--data", flags.data, "Input CSV")->required();
    bench->add_option("--out", flags.out, "Report path (JSON)")->required();
    bench->add_option("--r-sweep", flags.r_sweep, "Merged tokens per layer, start:end:step");
    add_schedule_flags(bench, flags);

    auto* analyze = app.add_subcommand("analyze", "Spectral entropy, THD and redundancy per variate");
    analyze->add_option("--data", flags.data, "Input CSV")->required();
    analyze->add_option("--out", flags.out, "Report path (JSON)")->required();
    analyze->add_option("--sigma", flags.sigma, "Gaussian low-pass width in samples");
    analyze->add_option("--k", flags.k, "Locality bound for the redundancy profile");
    analyze->add_option("--metric", flags.metric, "Similarity metric: cosine, l1 or l2");
    analyze->add_option("--seed", flags.seed, "Tokenizer seed");

    auto* trace = app.add_subcommand("trace", "Run the model once and write its merge trace");
    trace->add_option("--config", flags.config, "Model config (JSON)")->required();
    trace->add_option("--data", flags.data, "Input CSV")->required();
    trace->add_option("--out", flags.out, "Trace path (JSON)")->required();
    trace->add_option("--r", flags.r, "Merged tokens per layer");
    add_schedule_flags(trace, flags);

    auto* ingest = app.add_subcommand("ingest-check", "Validate a CSV file and print its shape");
    ingest->add_option("--data", flags.data, "Input CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(kExitConfig, "usage", e.what());
    }

    try {
        if (*bench) {
            tsmerge::BenchOptions options;
            options.config_path = flags.config;
            options.data_path = flags.data;
            options.out_path = flags.out;
            options.overrides = overrides_from(flags);
            if (flags.r_sweep) {
                options.r_sweep = tsmerge::SweepRange::parse(*flags.r_sweep);
            }
            const auto report = tsmerge::bench_run(options);
            std::cout << "wrote " << flags.out << " (" << report.at("points").size() << " points)\n";
        } else if (*analyze) {
            tsmerge::AnalyzeRunOptions options;
            options.data_path = flags.data;
            options.out_path = flags.out;
            options.signal.sigma = flags.sigma;
            if (flags.k) {
                options.signal.k = *flags.k;
            }
            if (flags.seed) {
                options.signal.seed = *flags.seed;
            }
            options.signal.metric = overrides_from(flags).metric.value_or(tsmerge::Metric::cosine);
            tsmerge::analyze_run(options);
            std::cout << "wrote " << flags.out << '\n';
        } else if (*trace) {
            tsmerge::TraceOptions options;
            options.config_path = flags.config;
            options.data_path = flags.data;
            options.out_path = flags.out;
            options.overrides = overrides_from(flags);
            const auto j = tsmerge::trace_run(options);
            std::cout << "wrote " << flags.out << " (" << j.at("layers").size() << " layers)\n";
        } else if (*ingest) {
            const tsmerge::Series s = tsmerge::ingest_csv(flags.data);
            const nlohmann::json j = {{"rows", s.m}, {"columns", s.n}, {"names", s.names}};
            std::cout << j.dump() << '\n';
        }
    } catch (const tsmerge::Error& e) {
        return report_error(exit_code_for(e.code()), tsmerge::to_string(e.code()), e.what());
    } catch (const std::exception& e) {
        return report_error(kExitInternal, "internal", e.what());
    }
    return kExitOk;
}
