// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tsmerge/seqcore.hpp"

namespace tsmerge {

/// Seeded generator with platform-independent uniform and normal draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : m_engine(seed) {}

    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }
    double normal();

    /// Independent child stream derived from this generator's seed space.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

private:
    std::mt19937_64 m_engine;
    bool m_has_spare = false;
    double m_spare = 0.0;
};

Matrix random_matrix(std::size_t rows, std::size_t cols, double scale, Rng& rng);

/// a (n x k) times b (k x m).
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);

/// Per-row normalisation to zero mean and unit variance (eps 1e-5), no affine.
Matrix layer_norm(const Matrix& x);
void softmax_rows(Matrix& logits);
double gelu(double v);

/// Columns [first, first + count) of x.
Matrix columns(const Matrix& x, std::size_t first, std::size_t count);

/// Row-stochastic attention weights softmax(q k^T / sqrt(d_head) + bias).
///
/// `key_bias` (optional, one entry per key) is added to every logit row;
/// `allowed` (optional, q.rows() x k.rows(), row-major) masks keys out when 0.
Matrix attention_weights(const Matrix& q,
                         const Matrix& k,
                         std::span<const double> key_bias = {},
                         std::span<const std::uint8_t> allowed = {});

struct AttentionParams {
    Matrix wq, wk, wv, wo;  // d x d each
};

AttentionParams random_attention(std::size_t d, Rng& rng);

/// Multi-head attention of `queries` over `keys` (d columns each); heads split
/// the model dimension evenly.
Matrix multi_head_attention(const Matrix& queries,
                            const Matrix& keys,
                            const AttentionParams& params,
                            std::size_t heads,
                            std::span<const double> key_bias = {},
                            std::span<const std::uint8_t> allowed = {});

struct MlpParams {
    Matrix w1;  // d x h
    Matrix w2;  // h x d
};

MlpParams random_mlp(std::size_t d, std::size_t h, Rng& rng);
Matrix mlp(const Matrix& x, const MlpParams& params);

}  // namespace tsmerge
