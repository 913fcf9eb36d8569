// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/bench.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <string>

#include "tsmerge/causal.hpp"
#include "tsmerge/config.hpp"
#include "tsmerge/error.hpp"
#include "tsmerge/series.hpp"
#include "tsmerge/tokenize.hpp"

namespace tsmerge {

namespace {

std::size_t parse_count(std::string_view text, std::string_view what) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::config, "bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::config, path.string() + ": cannot write");
    }
    out << j.dump(2) << '\n';
}

std::string stem_of(const std::filesystem::path& out) {
    std::string stem = out.stem().string();
    return stem.empty() ? "report" : stem;
}

struct Model {
    explicit Model(const ModelConfig& config) : config(config) {
        if (config.merge_hook == MergeHook::after_operator) {
            conv.emplace(config);
        } else {
            encoder.emplace(config);
        }
    }

    EncoderResult forward(const TokenMatrix& x) const {
        return conv ? conv->forward(x) : encoder->forward(x);
    }
    EncoderResult forward_reference(const TokenMatrix& x) const {
        return conv ? conv->forward_reference(x) : encoder->forward_reference(x);
    }
    const char* name() const {
        return conv ? "gated-convolution" : "transformer-encoder";
    }

    ModelConfig config;
    std::optional<TransformerEncoder> encoder;
    std::optional<GatedConvModel> conv;
};

double l2_distance(const Matrix& a, const Matrix& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        const double diff = a.data()[i] - b.data()[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

nlohmann::json ledger_layers(const FlopLedger& ledger) {
    nlohmann::json layers = nlohmann::json::array();
    for (const LayerFlops& l : ledger.layers) {
        layers.push_back({{"tokens_in", l.tokens_in},
                          {"tokens_out", l.tokens_out},
                          {"attention", l.attention},
                          {"projection", l.projection},
                          {"mlp", l.mlp},
                          {"mixer", l.mixer},
                          {"merge_overhead", l.merge_overhead},
                          {"similarity_evaluations", l.similarity_evaluations},
                          {"merged", l.merged}});
    }
    return layers;
}

ModelConfig load_with_overrides(const std::filesystem::path& path, const ScheduleOverrides& overrides) {
    ModelConfig config = load_model_config(path);
    try {
        overrides.apply(config);
        config.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::config, e.what());
    }
    return config;
}

}  // namespace

SweepRange SweepRange::parse(std::string_view text) {
    SweepRange range;
    const auto first_colon = text.find(':');
    if (first_colon == std::string_view::npos) {
        range.first = range.last = parse_count(text, "r-sweep");
        return range;
    }
    range.first = parse_count(text.substr(0, first_colon), "r-sweep start");
    const auto rest = text.substr(first_colon + 1);
    const auto second_colon = rest.find(':');
    if (second_colon == std::string_view::npos) {
        range.last = parse_count(rest, "r-sweep end");
    } else {
        range.last = parse_count(rest.substr(0, second_colon), "r-sweep end");
        range.step = parse_count(rest.substr(second_colon + 1), "r-sweep step");
    }
    if (range.step == 0 || range.last < range.first) {
        throw Error(ErrorCode::config, "r-sweep needs start <= end and a positive step");
    }
    return range;
}

std::vector<std::size_t> SweepRange::values() const {
    std::vector<std::size_t> out;
    for (std::size_t r = first; r <= last; r += step) {
        out.push_back(r);
    }
    return out;
}

void ScheduleOverrides::apply(ModelConfig& config) const {
    if (seed) {
        config.seed = *seed;
    }
    if (!r && !tau && !k && !q && !metric) {
        return;
    }
    std::vector<LayerSchedule> expanded;
    for (std::size_t l = 0; l < config.layers; ++l) {
        expanded.push_back(config.layer_schedule(l));
    }
    for (LayerSchedule& s : expanded) {
        if (r) {
            s.mode = ScheduleMode::fixed;
            s.r = *r;
        }
        if (tau) {
            s.mode = ScheduleMode::dynamic;
            s.tau = *tau;
        }
        if (k) {
            s.k = *k;
        }
        if (q) {
            s.q = *q;
        }
        if (metric) {
            s.metric = *metric;
        }
    }
    config.schedule = std::move(expanded);
}

TokenMatrix model_input(const ModelConfig& config, const Series& data) {
    if (data.n != config.n) {
        throw Error(ErrorCode::shape,
                    "data has " + std::to_string(data.n) + " variates, config expects n=" + std::to_string(config.n));
    }
    const Series window = data.head(config.m);
    return config.patch_len == 1 ? tokenize_timestep(window, config.d, config.seed)
                                 : tokenize_patch(window, config.patch_len, config.d, config.seed);
}

nlohmann::json bench_run(const BenchOptions& options) {
    const ModelConfig base = load_with_overrides(options.config_path, options.overrides);
    const Series data = ingest_csv(options.data_path);
    const TokenMatrix input = model_input(base, data);

    std::vector<std::optional<std::size_t>> points;
    if (options.r_sweep) {
        for (std::size_t r : options.r_sweep->values()) {
            points.emplace_back(r);
        }
    } else {
        points.emplace_back(std::nullopt);
    }

    const Model reference_model(base);
    const EncoderResult reference = reference_model.forward_reference(input);
    const Matrix reference_out = unmerge(reference.tokens).values();

    const std::string stem = stem_of(options.out_path);
    const std::filesystem::path out_dir = options.out_path.parent_path();

    struct PointResult {
        ModelConfig config;
        EncoderResult result;
    };
    std::vector<std::future<PointResult>> running;
    for (const auto& r : points) {
        ModelConfig config = base;
        if (r) {
            ScheduleOverrides sweep;
            sweep.r = *r;
            sweep.apply(config);
        }
        running.push_back(std::async(std::launch::async, [config, &input]() {
            const Model model(config);
            return PointResult{config, model.forward(input)};
        }));
    }

    nlohmann::json point_reports = nlohmann::json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
        PointResult point = running[i].get();
        const FlopLedger& ledger = point.result.ledger;
        const std::string trace_name =
            stem + "_traces/" + (points[i] ? "r" + std::to_string(*points[i]) : std::string("config")) + ".json";
        write_json(out_dir / trace_name, trace_to_json(point.result.trace));

        nlohmann::json schedule = nlohmann::json::array();
        for (std::size_t l = 0; l < point.config.layers; ++l) {
            schedule.push_back(schedule_to_json(point.config.layer_schedule(l)));
        }
        nlohmann::json entry = {
            {"r", points[i] ? nlohmann::json(*points[i]) : nlohmann::json(nullptr)},
            {"schedule", std::move(schedule)},
            {"tokens_out", point.result.tokens.length()},
            {"flops_total", ledger.total()},
            {"flops_ref", ledger.reference_total()},
            {"speedup", ledger.speedup()},
            {"attention_speedup", ledger.attention_speedup()},
            {"output_delta_L2", l2_distance(unmerge(point.result.tokens).values(), reference_out)},
            {"layers", ledger_layers(ledger)},
            {"trace_path", trace_name},
        };
        point_reports.push_back(std::move(entry));
    }

    nlohmann::json report = {
        {"schema", "tsmerge-bench-v1"},
        {"model", reference_model.name()},
        {"config", config_to_json(base)},
        {"tokens", input.length()},
        {"speedup_bound", speedup_bound(static_cast<int>(base.layers))},
        {"points", std::move(point_reports)},
    };
    write_json(options.out_path, report);
    return report;
}

nlohmann::json trace_run(const TraceOptions& options) {
    const ModelConfig config = load_with_overrides(options.config_path, options.overrides);
    const Series data = ingest_csv(options.data_path);
    const Model model(config);
    const EncoderResult result = model.forward(model_input(config, data));
    nlohmann::json j = trace_to_json(result.trace);
    write_json(options.out_path, j);
    return j;
}

nlohmann::json analyze_run(const AnalyzeRunOptions& options) {
    const Series data = ingest_csv(options.data_path);
    if (data.m < 2) {
        throw Error(ErrorCode::ingestion, options.data_path.string() + ": need at least 2 rows to analyze");
    }
    const std::string stem = stem_of(options.out_path);
    const std::string csv_name = stem + "_redundancy.csv";

    nlohmann::json variates = nlohmann::json::array();
    std::string csv = "variate,threshold,fraction\n";
    double entropy_sum = 0.0;
    double filtered_sum = 0.0;
    double thd_sum = 0.0;
    std::size_t thd_count = 0;
    for (std::size_t c = 0; c < data.n; ++c) {
        const SignalReport report = analyze_series(data.column(c), options.signal);
        nlohmann::json curve = nlohmann::json::array();
        for (const RedundancyPoint& p : report.redundancy_curve) {
            curve.push_back({{"threshold", p.threshold}, {"fraction", p.fraction}});
            csv += data.names[c] + "," + nlohmann::json(p.threshold).dump() + "," + nlohmann::json(p.fraction).dump() +
                   "\n";
        }
        variates.push_back({
            {"name", data.names[c]},
            {"spectral_entropy", report.spectral_entropy},
            {"thd", report.thd ? nlohmann::json(*report.thd) : nlohmann::json(nullptr)},
            {"thd_fundamental_bin", report.fundamental_bin},
            {"thd_harmonic_order", report.harmonic_order},
            {"gaussian_sigma", report.gaussian_sigma},
            {"filtered_spectral_entropy", report.filtered_spectral_entropy},
            {"redundancy_curve", std::move(curve)},
        });
        entropy_sum += report.spectral_entropy;
        filtered_sum += report.filtered_spectral_entropy;
        if (report.thd) {
            thd_sum += *report.thd;
            ++thd_count;
        }
    }
    const double n = static_cast<double>(data.n);
    nlohmann::json report = {
        {"schema", "tsmerge-analyze-v1"},
        {"m", data.m},
        {"n", data.n},
        {"variates", std::move(variates)},
        {"mean",
         {{"spectral_entropy", entropy_sum / n},
          {"thd", thd_count > 0 ? nlohmann::json(thd_sum / static_cast<double>(thd_count)) : nlohmann::json(nullptr)},
          {"filtered_spectral_entropy", filtered_sum / n}}},
        {"redundancy_csv", csv_name},
    };
    write_json(options.out_path, report);
    std::ofstream csv_out(options.out_path.parent_path() / csv_name, std::ios::binary);
    csv_out << csv;
    return report;
}

}  // namespace tsmerge
