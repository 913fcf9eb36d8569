// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/models.hpp"

#include <cmath>
#include <string>

#include "tsmerge/causal.hpp"
#include "tsmerge/error.hpp"
#include "tsmerge/fft_conv.hpp"
#include "tsmerge/merge.hpp"

namespace tsmerge {

namespace {

constexpr std::uint64_t kEncoderStream = 1000;
constexpr std::uint64_t kDecoderStream = 2000;
constexpr std::uint64_t kHeadStream = 2999;
constexpr std::uint64_t kConvStream = 3000;

const LayerSchedule kNoMerging{};

MergeTrace trace_of(const TokenMatrix& x) {
    MergeTrace trace;
    trace.final_map.assign(x.original_length(), 0);
    for (std::size_t i = 0; i < x.length(); ++i) {
        for (const Span& s : x.origin(i)) {
            for (std::size_t p = s.lo; p <= s.hi; ++p) {
                trace.final_map[p] = i;
            }
        }
    }
    for (const Orphan& o : x.orphans()) {
        trace.final_map[o.position] = trace.final_map[o.anchor];
        trace.orphaned.push_back(o.position);
    }
    return trace;
}

/// Applies one layer's schedule to `x`, extending `trace`. Returns the plan.
MergePlan reduce(TokenMatrix& x, MergeTrace& trace, const LayerSchedule& schedule, std::size_t& evaluations) {
    MergePlan plan = plan_layer(x, schedule, &evaluations);
    if (schedule.reduction == Reduction::merge) {
        x = merge_apply(x, plan);
        trace = trace_compose(trace, plan);
    } else {
        x = prune_apply(x, plan);
        trace = trace_compose_pruned(trace, plan);
    }
    return plan;
}

void add_in_place(TokenMatrix& x, const Matrix& delta) {
    x = x.with_values(add(x.values(), delta));
}

void require_causal(const std::vector<LayerSchedule>& schedules, const char* where) {
    for (const LayerSchedule& s : schedules) {
        if (s.k != 1) {
            throw Error(ErrorCode::contract_violation,
                        std::string(where) + " merges only adjacent tokens (k=1), schedule has k=" +
                            std::to_string(s.k));
        }
    }
}

}  // namespace

void ModelConfig::validate() const {
    const auto fail = [](const std::string& what) {
        throw Error(ErrorCode::config, what);
    };
    if (layers < 1) {
        fail("L must be at least 1");
    }
    if (d < 1 || h < 1 || heads < 1) {
        fail("d, h and heads must be positive");
    }
    if (d % heads != 0) {
        fail("d=" + std::to_string(d) + " is not divisible by heads=" + std::to_string(heads));
    }
    if (m < 1 || n < 1) {
        fail("m and n must be positive");
    }
    if (patch_len < 1 || m % patch_len != 0) {
        fail("patch_len=" + std::to_string(patch_len) + " does not divide m=" + std::to_string(m));
    }
    if (!schedule.empty() && schedule.size() != 1 && schedule.size() != layers) {
        fail("schedule has " + std::to_string(schedule.size()) + " entries for L=" + std::to_string(layers));
    }
    if (decoder_schedule.empty()) {
        fail("decoder needs at least one layer");
    }
    for (const auto& s : schedule) {
        s.validate();
    }
    for (const auto& s : decoder_schedule) {
        s.validate();
    }
}

const LayerSchedule& ModelConfig::layer_schedule(std::size_t layer) const {
    if (schedule.empty()) {
        return kNoMerging;
    }
    return schedule.size() == 1 ? schedule.front() : schedule.at(layer);
}

std::vector<double> log_size_bias(const TokenMatrix& x) {
    std::vector<double> bias(x.length());
    for (std::size_t i = 0; i < x.length(); ++i) {
        bias[i] = std::log(static_cast<double>(x.size(i)));
    }
    return bias;
}

std::vector<std::uint8_t> causal_mask(const TokenMatrix& x) {
    const std::size_t t = x.length();
    std::vector<std::uint8_t> allowed(t * t, 0);
    for (std::size_t i = 0; i < t; ++i) {
        const std::size_t latest = x.span(i).hi;
        for (std::size_t j = 0; j < t; ++j) {
            allowed[i * t + j] = x.span(j).lo <= latest ? 1 : 0;
        }
    }
    return allowed;
}

// ---------------------------------------------------------------------------
// Encoder

TransformerEncoder::TransformerEncoder(const ModelConfig& config) : m_config(config) {
    m_config.validate();
    for (std::size_t l = 0; l < m_config.layers; ++l) {
        Rng rng(Rng::derive(m_config.seed, kEncoderStream + l));
        Layer layer;
        layer.attention = random_attention(m_config.d, rng);
        layer.mlp = random_mlp(m_config.d, m_config.h, rng);
        m_layers.push_back(std::move(layer));
    }
}

EncoderResult TransformerEncoder::forward(const TokenMatrix& x) const {
    return run(x, true);
}

EncoderResult TransformerEncoder::forward_reference(const TokenMatrix& x) const {
    return run(x, false);
}

EncoderResult TransformerEncoder::run(const TokenMatrix& x, bool merging) const {
    if (x.dim() != m_config.d) {
        throw Error(ErrorCode::shape,
                    "encoder expects d=" + std::to_string(m_config.d) + ", got " + std::to_string(x.dim()));
    }
    const std::size_t t0 = x.length();
    TokenMatrix cur = x;
    MergeTrace trace = trace_of(x);
    FlopLedger ledger;
    for (std::size_t l = 0; l < m_layers.size(); ++l) {
        const Layer& layer = m_layers[l];
        const std::size_t t_in = cur.length();

        const Matrix normed = layer_norm(cur.values());
        const std::vector<double> bias = m_config.proportional_attention ? log_size_bias(cur) : std::vector<double>{};
        add_in_place(cur, multi_head_attention(normed, normed, layer.attention, m_config.heads, bias));

        std::size_t evaluations = 0;
        std::size_t edges = 0;
        if (merging) {
            edges = reduce(cur, trace, m_config.layer_schedule(l), evaluations).r();
        }

        add_in_place(cur, mlp(layer_norm(cur.values()), layer.mlp));

        ledger.layers.push_back(
            transformer_layer_flops(t_in, cur.length(), m_config.d, m_config.h, evaluations, edges));
        ledger.reference.push_back(transformer_layer_flops(t0, t0, m_config.d, m_config.h, 0, 0));
    }
    return {std::move(cur), std::move(trace), std::move(ledger)};
}

// ---------------------------------------------------------------------------
// Decoder

TransformerDecoder::TransformerDecoder(const ModelConfig& config) : m_config(config) {
    m_config.validate();
    for (std::size_t l = 0; l < m_config.decoder_schedule.size(); ++l) {
        Rng rng(Rng::derive(m_config.seed, kDecoderStream + l));
        Layer layer;
        layer.self_attention = random_attention(m_config.d, rng);
        layer.cross_attention = random_attention(m_config.d, rng);
        layer.mlp = random_mlp(m_config.d, m_config.h, rng);
        m_layers.push_back(std::move(layer));
    }
    Rng rng(Rng::derive(m_config.seed, kHeadStream));
    m_head = random_matrix(m_config.d, m_config.n, 1.0 / std::sqrt(static_cast<double>(m_config.d)), rng);
}

DecoderResult TransformerDecoder::forward(const TokenMatrix& x_dec, const TokenMatrix& enc_out) const {
    return run(x_dec, enc_out, true);
}

DecoderResult TransformerDecoder::forward_reference(const TokenMatrix& x_dec, const TokenMatrix& enc_out) const {
    return run(x_dec, enc_out, false);
}

DecoderResult TransformerDecoder::run(const TokenMatrix& x_dec, const TokenMatrix& enc_out, bool merging) const {
    if (merging) {
        require_causal(m_config.decoder_schedule, "decoder");
    }
    if (x_dec.dim() != m_config.d || enc_out.dim() != m_config.d) {
        throw Error(ErrorCode::shape, "decoder inputs must have d=" + std::to_string(m_config.d));
    }
    if (x_dec.original_length() != m_config.p) {
        throw Error(ErrorCode::shape,
                    "decoder input covers " + std::to_string(x_dec.original_length()) + " positions, horizon p=" +
                        std::to_string(m_config.p));
    }
    const Matrix memory = layer_norm(enc_out.values());
    const std::vector<double> memory_bias =
        m_config.proportional_attention ? log_size_bias(enc_out) : std::vector<double>{};

    TokenMatrix cur = x_dec;
    MergeTrace trace = trace_of(x_dec);
    for (std::size_t l = 0; l < m_layers.size(); ++l) {
        const Layer& layer = m_layers[l];
        const Matrix normed = layer_norm(cur.values());
        const std::vector<double> bias = m_config.proportional_attention ? log_size_bias(cur) : std::vector<double>{};
        const std::vector<std::uint8_t> mask = causal_mask(cur);
        add_in_place(cur, multi_head_attention(normed, normed, layer.self_attention, m_config.heads, bias, mask));

        if (merging) {
            std::size_t evaluations = 0;
            reduce(cur, trace, m_config.decoder_schedule[l], evaluations);
        }

        add_in_place(cur, multi_head_attention(layer_norm(cur.values()), memory, layer.cross_attention,
                                               m_config.heads, memory_bias));
        add_in_place(cur, mlp(layer_norm(cur.values()), layer.mlp));
    }
    const TokenMatrix restored = unmerge(cur);
    return {matmul(restored.values(), m_head), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Gated long convolution

GatedConvModel::GatedConvModel(const ModelConfig& config) : m_config(config) {
    m_config.validate();
    const std::size_t d = m_config.d;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t l = 0; l < m_config.layers; ++l) {
        Rng rng(Rng::derive(m_config.seed, kConvStream + l));
        Layer layer;
        layer.w_value = random_matrix(d, d, scale, rng);
        layer.w_gate = random_matrix(d, d, scale, rng);
        layer.w_out = random_matrix(d, d, scale, rng);
        for (std::size_t c = 0; c < d; ++c) {
            layer.decay.push_back(std::exp(rng.uniform(std::log(1e-3), std::log(0.3))));
            layer.frequency.push_back(rng.uniform(0.0, 0.5));
        }
        layer.mlp = random_mlp(d, m_config.h, rng);
        m_layers.push_back(std::move(layer));
    }
}

EncoderResult GatedConvModel::forward(const TokenMatrix& x) const {
    return run(x, true);
}

EncoderResult GatedConvModel::forward_reference(const TokenMatrix& x) const {
    return run(x, false);
}

Matrix GatedConvModel::mix(const Matrix& normed, const Layer& layer) const {
    const std::size_t t = normed.rows();
    const std::size_t d = normed.cols();
    const Matrix value = matmul(normed, layer.w_value);
    const Matrix gate = matmul(normed, layer.w_gate);
    Matrix mixed(t, d);
    std::vector<double> channel(t);
    std::vector<double> filter(t);
    for (std::size_t c = 0; c < d; ++c) {
        const double norm = 1.0 - std::exp(-layer.decay[c]);
        for (std::size_t i = 0; i < t; ++i) {
            channel[i] = value(i, c);
            const double pos = static_cast<double>(i);
            filter[i] = norm * std::exp(-layer.decay[c] * pos) * std::cos(layer.frequency[c] * pos);
        }
        const std::vector<double> y = causal_fft_convolve(channel, filter);
        for (std::size_t i = 0; i < t; ++i) {
            mixed(i, c) = y[i] / (1.0 + std::exp(-gate(i, c)));
        }
    }
    return matmul(mixed, layer.w_out);
}

EncoderResult GatedConvModel::run(const TokenMatrix& x, bool merging) const {
    if (merging) {
        std::vector<LayerSchedule> used;
        for (std::size_t l = 0; l < m_layers.size(); ++l) {
            used.push_back(m_config.layer_schedule(l));
        }
        require_causal(used, "state-space path");
    }
    if (x.dim() != m_config.d) {
        throw Error(ErrorCode::shape,
                    "model expects d=" + std::to_string(m_config.d) + ", got " + std::to_string(x.dim()));
    }
    const std::size_t t0 = x.length();
    TokenMatrix cur = x;
    MergeTrace trace = trace_of(x);
    FlopLedger ledger;
    for (std::size_t l = 0; l < m_layers.size(); ++l) {
        const Layer& layer = m_layers[l];
        const std::size_t t_in = cur.length();
        add_in_place(cur, mix(layer_norm(cur.values()), layer));

        std::size_t evaluations = 0;
        std::size_t edges = 0;
        if (merging) {
            edges = reduce(cur, trace, m_config.layer_schedule(l), evaluations).r();
        }
        add_in_place(cur, mlp(layer_norm(cur.values()), layer.mlp));

        ledger.layers.push_back(gated_conv_layer_flops(t_in, cur.length(), m_config.d, m_config.h, evaluations, edges));
        ledger.reference.push_back(gated_conv_layer_flops(t0, t0, m_config.d, m_config.h, 0, 0));
    }
    return {std::move(cur), std::move(trace), std::move(ledger)};
}

EncoderResult encoder_forward(const TokenMatrix& x, const ModelConfig& config) {
    return TransformerEncoder(config).forward(x);
}

DecoderResult decoder_forward(const TokenMatrix& x_dec, const TokenMatrix& enc_out, const ModelConfig& config) {
    return TransformerDecoder(config).forward(x_dec, enc_out);
}

EncoderResult ssm_forward(const TokenMatrix& x, const ModelConfig& config) {
    return GatedConvModel(config).forward(x);
}

}  // namespace tsmerge
