// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tsmerge {

// Analytic FLOP counts. One multiply-accumulate counts as 2 FLOPs.
namespace flops {

/// Scores q k^T (2 t^2 d) plus the weighted sum over values (2 t^2 d).
std::uint64_t attention(std::size_t t, std::size_t d);
/// Q, K, V and output projections: 4 * (2 t d^2).
std::uint64_t attention_projections(std::size_t t, std::size_t d);
/// Two dense layers d -> h -> d: 2 * (2 t d h).
std::uint64_t mlp(std::size_t t, std::size_t d, std::size_t h);
/// 2 d per similarity evaluation plus 3 d per applied edge.
std::uint64_t merge_overhead(std::size_t d, std::size_t evaluations, std::size_t edges);
/// Depthwise causal FFT convolution over d channels: three real transforms of
/// length N = fft_length(t) at 2.5 N log2 N each, a complex product per bin
/// (6 (N/2 + 1)), and the elementwise gate (t per channel).
std::uint64_t long_convolution(std::size_t t, std::size_t d);
/// Value, gate and output projections of the gated convolution block: 3 * (2 t d^2).
std::uint64_t gated_projections(std::size_t t, std::size_t d);

}  // namespace flops

struct LayerFlops {
    std::size_t tokens_in = 0;
    std::size_t tokens_out = 0;
    std::uint64_t attention = 0;
    std::uint64_t projection = 0;
    std::uint64_t mlp = 0;
    std::uint64_t mixer = 0;  // long convolution in the state-space stand-in
    std::uint64_t merge_overhead = 0;
    std::size_t similarity_evaluations = 0;
    std::size_t merged = 0;

    std::uint64_t total() const noexcept {
        return attention + projection + mlp + mixer + merge_overhead;
    }
};

/// Per-layer counts for a run and for the same model without merging.
struct FlopLedger {
    std::vector<LayerFlops> layers;
    std::vector<LayerFlops> reference;

    std::uint64_t total() const;
    std::uint64_t reference_total() const;
    std::uint64_t attention_total() const;
    std::uint64_t reference_attention_total() const;

    double speedup() const;
    /// Attention-only ratio: the idealised quantity the closed-form bound describes.
    double attention_speedup() const;
};

/// Transformer layer with merging between attention and MLP: attention and
/// projections run on t_in tokens, the MLP on t_out.
LayerFlops transformer_layer_flops(std::size_t t_in,
                                   std::size_t t_out,
                                   std::size_t d,
                                   std::size_t h,
                                   std::size_t evaluations,
                                   std::size_t edges);

/// Gated long-convolution layer with merging after the operator.
LayerFlops gated_conv_layer_flops(std::size_t t_in,
                                  std::size_t t_out,
                                  std::size_t d,
                                  std::size_t h,
                                  std::size_t evaluations,
                                  std::size_t edges);

/// Upper bound 3 L 4^(L-1) / (4^L - 1) on the attention speed-up from halving
/// the tokens after every layer's attention. Throws ErrorCode::parameter for L < 1.
double speedup_bound(int layers);

}  // namespace tsmerge
