// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tsmerge/flops.hpp"
#include "tsmerge/nn.hpp"
#include "tsmerge/seqcore.hpp"

namespace tsmerge {

enum class MergeHook { after_attention, after_operator };

struct ModelConfig {
    std::size_t layers = 2;  // L
    std::size_t d = 16;
    std::size_t h = 32;
    std::size_t heads = 2;
    std::size_t m = 64;
    std::size_t n = 1;
    std::size_t p = 0;
    std::size_t patch_len = 1;
    /// One entry per encoder layer, or a single entry applied to all of them.
    std::vector<LayerSchedule> schedule;
    /// Decoder layers; k must be 1 throughout.
    std::vector<LayerSchedule> decoder_schedule{LayerSchedule{}};
    MergeHook merge_hook = MergeHook::after_attention;
    bool proportional_attention = false;
    std::uint64_t seed = 0;

    /// Throws ErrorCode::config.
    void validate() const;
    const LayerSchedule& layer_schedule(std::size_t layer) const;
    std::size_t tokens() const {
        return m / patch_len;
    }
};

struct EncoderResult {
    TokenMatrix tokens;
    MergeTrace trace;
    FlopLedger ledger;
};

/// Pre-norm transformer encoder with fixed random weights. Each layer runs
/// self-attention, merges the residual stream per its schedule, then the MLP.
class TransformerEncoder {
public:
    explicit TransformerEncoder(const ModelConfig& config);

    EncoderResult forward(const TokenMatrix& x) const;
    /// Same weights, merging disabled.
    EncoderResult forward_reference(const TokenMatrix& x) const;

private:
    struct Layer {
        AttentionParams attention;
        MlpParams mlp;
    };
    EncoderResult run(const TokenMatrix& x, bool merging) const;

    ModelConfig m_config;
    std::vector<Layer> m_layers;
};

struct DecoderResult {
    Matrix forecast;  // p x n
    MergeTrace trace;
};

/// Causal decoder: masked self-attention, causal merge, cross-attention over
/// the encoder output, MLP. Tokens are unmerged once after the last layer and
/// a linear head maps them to n variates.
class TransformerDecoder {
public:
    explicit TransformerDecoder(const ModelConfig& config);

    DecoderResult forward(const TokenMatrix& x_dec, const TokenMatrix& enc_out) const;
    DecoderResult forward_reference(const TokenMatrix& x_dec, const TokenMatrix& enc_out) const;

private:
    struct Layer {
        AttentionParams self_attention;
        AttentionParams cross_attention;
        MlpParams mlp;
    };
    DecoderResult run(const TokenMatrix& x_dec, const TokenMatrix& enc_out, bool merging) const;

    ModelConfig m_config;
    std::vector<Layer> m_layers;
    Matrix m_head;  // d x n
};

/// Stand-in for Hyena/Mamba blocks: a gated depthwise long convolution with
/// fixed decaying filters, followed by causal merging (k = 1) and an MLP.
class GatedConvModel {
public:
    explicit GatedConvModel(const ModelConfig& config);

    EncoderResult forward(const TokenMatrix& x) const;
    EncoderResult forward_reference(const TokenMatrix& x) const;

private:
    struct Layer {
        Matrix w_value;  // d x d
        Matrix w_gate;   // d x d
        Matrix w_out;    // d x d
        std::vector<double> decay;      // per channel
        std::vector<double> frequency;  // per channel
        MlpParams mlp;
    };
    EncoderResult run(const TokenMatrix& x, bool merging) const;
    Matrix mix(const Matrix& normed, const Layer& layer) const;

    ModelConfig m_config;
    std::vector<Layer> m_layers;
};

EncoderResult encoder_forward(const TokenMatrix& x, const ModelConfig& config);
DecoderResult decoder_forward(const TokenMatrix& x_dec, const TokenMatrix& enc_out, const ModelConfig& config);
EncoderResult ssm_forward(const TokenMatrix& x, const ModelConfig& config);

/// Per-key attention bias log(size) used by proportional attention.
std::vector<double> log_size_bias(const TokenMatrix& x);

/// Causal mask over possibly merged tokens: query i may see key j iff j's
/// earliest original position is not after i's latest one.
std::vector<std::uint8_t> causal_mask(const TokenMatrix& x);

}  // namespace tsmerge
