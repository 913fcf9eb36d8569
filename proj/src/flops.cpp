// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/flops.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "tsmerge/error.hpp"
#include "tsmerge/fft_conv.hpp"

namespace tsmerge {

namespace flops {

std::uint64_t attention(std::size_t t, std::size_t d) {
    return 4ULL * t * t * d;
}

std::uint64_t attention_projections(std::size_t t, std::size_t d) {
    return 8ULL * t * d * d;
}

std::uint64_t mlp(std::size_t t, std::size_t d, std::size_t h) {
    return 4ULL * t * d * h;
}

std::uint64_t merge_overhead(std::size_t d, std::size_t evaluations, std::size_t edges) {
    return 2ULL * d * evaluations + 3ULL * d * edges;
}

std::uint64_t long_convolution(std::size_t t, std::size_t d) {
    if (t == 0) {
        return 0;
    }
    const std::uint64_t n = fft_length(t);
    const std::uint64_t log2n = static_cast<std::uint64_t>(std::countr_zero(n));
    const std::uint64_t transforms = 3ULL * (5ULL * n * log2n) / 2ULL;
    const std::uint64_t product = 6ULL * (n / 2 + 1);
    return d * (transforms + product + t);
}

std::uint64_t gated_projections(std::size_t t, std::size_t d) {
    return 6ULL * t * d * d;
}

}  // namespace flops

std::uint64_t FlopLedger::total() const {
    std::uint64_t sum = 0;
    for (const auto& l : layers) {
        sum += l.total();
    }
    return sum;
}

std::uint64_t FlopLedger::reference_total() const {
    std::uint64_t sum = 0;
    for (const auto& l : reference) {
        sum += l.total();
    }
    return sum;
}

std::uint64_t FlopLedger::attention_total() const {
    std::uint64_t sum = 0;
    for (const auto& l : layers) {
        sum += l.attention;
    }
    return sum;
}

std::uint64_t FlopLedger::reference_attention_total() const {
    std::uint64_t sum = 0;
    for (const auto& l : reference) {
        sum += l.attention;
    }
    return sum;
}

double FlopLedger::speedup() const {
    const std::uint64_t run = total();
    return run == 0 ? 1.0 : static_cast<double>(reference_total()) / static_cast<double>(run);
}

double FlopLedger::attention_speedup() const {
    const std::uint64_t run = attention_total();
    return run == 0 ? 1.0 : static_cast<double>(reference_attention_total()) / static_cast<double>(run);
}

LayerFlops transformer_layer_flops(std::size_t t_in,
                                   std::size_t t_out,
                                   std::size_t d,
                                   std::size_t h,
                                   std::size_t evaluations,
                                   std::size_t edges) {
    LayerFlops l;
    l.tokens_in = t_in;
    l.tokens_out = t_out;
    l.attention = flops::attention(t_in, d);
    l.projection = flops::attention_projections(t_in, d);
    l.mlp = flops::mlp(t_out, d, h);
    l.merge_overhead = flops::merge_overhead(d, evaluations, edges);
    l.similarity_evaluations = evaluations;
    l.merged = edges;
    return l;
}

LayerFlops gated_conv_layer_flops(std::size_t t_in,
                                  std::size_t t_out,
                                  std::size_t d,
                                  std::size_t h,
                                  std::size_t evaluations,
                                  std::size_t edges) {
    LayerFlops l;
    l.tokens_in = t_in;
    l.tokens_out = t_out;
    l.mixer = flops::long_convolution(t_in, d);
    l.projection = flops::gated_projections(t_in, d);
    l.mlp = flops::mlp(t_out, d, h);
    l.merge_overhead = flops::merge_overhead(d, evaluations, edges);
    l.similarity_evaluations = evaluations;
    l.merged = edges;
    return l;
}

double speedup_bound(int layers) {
    if (layers < 1) {
        throw Error(ErrorCode::parameter, "speed-up bound needs at least one layer, got " + std::to_string(layers));
    }
    const double four_pow = std::ldexp(1.0, 2 * layers);  // 4^L
    return 3.0 * layers * (four_pow / 4.0) / (four_pow - 1.0);
}

}  // namespace tsmerge
